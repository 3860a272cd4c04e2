#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mnpcomm/channel.hpp"
#include "mnpcomm/random.hpp"

namespace mnpcomm {

// Advection-only Monte Carlo transport of point particles released at z = 0
// with radii drawn from the initial distribution. Independent of the closed
// form in channel.hpp except for sharing the parameter types.

struct OracleConfig {
  std::int64_t particle_count = 1'000'000;
  std::uint64_t rng_seed = 0;
  std::vector<double> time_points;
  unsigned threads = 0;  // 0: hardware concurrency
};

void validate_oracle_config(const OracleConfig& cfg);

/// Inverse-CDF draw: a * sqrt(1 - (1 - u)^(1 / (beta + 1))).
double sample_radius(const InitialDistribution& dist, double u);
double sample_radius(const InitialDistribution& dist, const CounterRng& rng,
                     std::uint64_t counter);

/// Fraction of the N particles with d <= v(r_i) t <= d + c_z, for one t.
double fraction_in_window(double t, const SystemResponse& resp,
                          const OracleConfig& cfg);

struct OraclePoint {
  double time;
  double analytic;
  double monte_carlo;
  double abs_err;
  double tolerance;  // 3 sqrt(P (1 - P) / N) + 1e-12
  bool pass;
};

struct OracleReport {
  std::string rng_algorithm;
  std::vector<OraclePoint> points;
  bool all_pass() const;
};

/// Fractions for every time point of cfg, sharing one particle ensemble.
std::vector<double> fractions_in_window(const SystemResponse& resp,
                                        const OracleConfig& cfg);

/// Compares the Monte Carlo fractions against system_response.
OracleReport run_oracle(const SystemResponse& resp, const OracleConfig& cfg);

/// `count` times covering the three response regimes: before arrival,
/// the rising edge, and the decaying tail out to 20 peak times.
std::vector<double> default_oracle_times(const SystemResponse& resp,
                                         int count = 20);

}  // namespace mnpcomm
