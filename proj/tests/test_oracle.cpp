#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mnpcomm/error.hpp"
#include "mnpcomm/oracle.hpp"

using namespace mnpcomm;

namespace {

SystemResponse baseline(double beta) {
  return SystemResponse::from_parameters(ShapeParameter(beta),
                                         table1_parameters());
}

}  // namespace

TEST_CASE("radius sampler endpoints") {
  const InitialDistribution dist(ShapeParameter(1.1), 0.75e-3);
  CHECK(sample_radius(dist, 0.0) == 0.0);
  CHECK(sample_radius(dist, std::nextafter(1.0, 0.0)) <= 0.75e-3);
  CHECK(sample_radius(dist, 0.5) > 0.0);
}

TEST_CASE("uniform disk: r^2/a^2 passes a Kolmogorov-Smirnov test") {
  const double a = 0.75e-3;
  const InitialDistribution dist(ShapeParameter(0.0), a);
  const CounterRng rng(2024);
  const int n = 100'000;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) {
    const double r = sample_radius(dist, rng, static_cast<std::uint64_t>(i));
    s[i] = (r / a) * (r / a);
  }
  std::sort(s.begin(), s.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    d = std::max(d, std::max((i + 1.0) / n - s[i], s[i] - static_cast<double>(i) / n));
  }
  // Asymptotic critical value at alpha = 0.01.
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampled radii follow the radial CDF") {
  const double a = 0.75e-3;
  const InitialDistribution dist(ShapeParameter(1.1), a);
  const CounterRng rng(99);
  const int n = 100'000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    if (sample_radius(dist, rng, static_cast<std::uint64_t>(i)) <= a / 2.0) {
      ++inside;
    }
  }
  const double p = radial_cdf(a / 2.0, dist);
  const double empirical = static_cast<double>(inside) / n;
  CHECK(std::abs(empirical - p) <= 3.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST_CASE("window fraction edge cases") {
  OracleConfig cfg;
  cfg.particle_count = 100'000;
  cfg.rng_seed = 5;
  CHECK(fraction_in_window(0.0, baseline(1.1), cfg) == 0.0);
  CHECK(fraction_in_window(1e6, baseline(0.0), cfg) <= 1e-4);

  cfg.particle_count = 0;
  CHECK_THROWS_AS(fraction_in_window(1.0, baseline(1.1), cfg), Error);
  cfg.particle_count = 10;
  cfg.time_points = {-1.0};
  CHECK_THROWS_AS(fractions_in_window(baseline(1.1), cfg), Error);
}

TEST_CASE("Monte Carlo fraction at the peak matches the peak formula") {
  const auto resp = baseline(1.1);
  OracleConfig cfg;
  cfg.particle_count = 1'000'000;
  cfg.rng_seed = 17;
  const double mc = fraction_in_window(resp.peak_time(), resp, cfg);
  const double p = peak(resp).value;
  CHECK(std::abs(mc - p) <= 3.0 * std::sqrt(p * (1.0 - p) / 1e6));
}

TEST_CASE("default time points span all three regimes") {
  const auto resp = baseline(1.1);
  const auto times = default_oracle_times(resp, 20);
  REQUIRE(times.size() == 20);
  int before = 0, rising = 0, falling = 0;
  for (double t : times) {
    if (t < resp.arrival_time()) ++before;
    else if (t < resp.peak_time()) ++rising;
    else ++falling;
  }
  CHECK(before > 0);
  CHECK(rising > 0);
  CHECK(falling > 0);
  CHECK(std::is_sorted(times.begin(), times.end()));
}

TEST_CASE("oracle agrees with the closed form") {
  for (double beta : {0.0, 1.1, 5.0}) {
    const auto resp = baseline(beta);
    OracleConfig cfg;
    cfg.particle_count = 200'000;
    cfg.rng_seed = 7;
    cfg.time_points = default_oracle_times(resp, 20);
    const auto report = run_oracle(resp, cfg);
    CAPTURE(beta);
    CHECK(report.rng_algorithm == "splitmix64-counter-v1");
    for (const auto& pt : report.points) {
      CAPTURE(pt.time);
      CHECK(pt.abs_err <= pt.tolerance);
    }
  }
}

TEST_CASE("oracle output is deterministic and independent of threading") {
  const auto resp = baseline(1.4);
  OracleConfig cfg;
  cfg.particle_count = 300'000;
  cfg.rng_seed = 123;
  cfg.time_points = default_oracle_times(resp, 20);
  cfg.threads = 1;
  const auto serial = fractions_in_window(resp, cfg);
  const auto again = fractions_in_window(resp, cfg);
  cfg.threads = 4;
  const auto parallel = fractions_in_window(resp, cfg);
  CHECK(serial == again);
  CHECK(serial == parallel);

  cfg.rng_seed = 124;
  CHECK(fractions_in_window(resp, cfg) != serial);
}

TEST_CASE("counter RNG") {
  const CounterRng rng(1);
  CHECK(rng.bits(0) == CounterRng(1).bits(0));
  CHECK(rng.bits(0) != rng.bits(1));
  CHECK(CounterRng(1, 0).bits(0) != CounterRng(1, 1).bits(0));
  double sum = 0.0, sum2 = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double z = rng.normal(i);
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}
