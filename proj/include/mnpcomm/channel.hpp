#pragma once

#include "mnpcomm/parameters.hpp"

namespace mnpcomm {

/// Cross-sectional density of the injected cloud right after injection:
///   f(x, y) = (beta + 1) / (pi a^2) * (1 - (x^2 + y^2) / a^2)^beta
class InitialDistribution {
 public:
  InitialDistribution(ShapeParameter beta, double tube_radius);

  double beta() const noexcept { return beta_.value(); }
  double tube_radius() const noexcept { return a_; }

 private:
  ShapeParameter beta_;
  double a_;
};

/// Throws for points outside the disk.
double initial_pdf(double x, double y, const InitialDistribution& dist);

/// Probability mass inside radius rho: 1 - (1 - rho^2/a^2)^(beta + 1).
double radial_cdf(double rho, const InitialDistribution& dist);

/// Fraction of injected particles inside the receiver window [d, d + c_z]
/// at time t after an axially concentrated release.
class SystemResponse {
 public:
  SystemResponse(ShapeParameter beta, double distance, double receiver_length,
                 double center_velocity);

  static SystemResponse from_parameters(ShapeParameter beta,
                                        const SystemParameters& p);

  double beta() const noexcept { return beta_.value(); }
  double distance() const noexcept { return d_; }
  double receiver_length() const noexcept { return cz_; }
  double center_velocity() const noexcept { return v0_; }

  /// First arrival at the window entrance, d / v0.
  double arrival_time() const noexcept { return d_ / v0_; }
  /// (d + c_z) / v0.
  double peak_time() const noexcept { return (d_ + cz_) / v0_; }

 private:
  ShapeParameter beta_;
  double d_;
  double cz_;
  double v0_;
};

double system_response(double t, const SystemResponse& resp);

struct Peak {
  double time;
  double value;
};

Peak peak(const SystemResponse& resp);

/// Time after which the response stays below `fraction` of its peak.
double tail_time(const SystemResponse& resp, double fraction);

/// Expected susceptibility chi_ref * (V_i / V_rx) * P(t), optionally
/// multiplied by an amplitude scale.
double susceptibility(double t, const SystemResponse& resp,
                      const SystemParameters& p, double amplitude_scale = 1.0);

/// chi_ref * V_i / V_rx.
double susceptibility_gain(const SystemParameters& p);

}  // namespace mnpcomm
