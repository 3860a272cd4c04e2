#pragma once

#include "mnpcomm/units.hpp"

namespace mnpcomm {

/// Physical description of the testbed. All members are SI.
struct SystemParameters {
  double tube_radius = 0.75 * units::kMillimeter;
  double injection_tube_radius = 0.40 * units::kMillimeter;
  double receiver_radius = 5.0 * units::kMillimeter;
  double receiver_length = 18.0 * units::kMillimeter;
  double propagation_distance = 5.0 * units::kCentimeter;
  double background_flow_rate = 5.0 * units::kMilliliterPerMinute;
  double injection_flow_rate = 5.26 * units::kMilliliterPerMinute;
  double injection_volume = 14.0 * units::kMicroliter;
  double symbol_duration = 4.0;
  double reference_susceptibility = 7.28e-3;
  double kinematic_viscosity = 1e-6;
  double diffusion_coefficient = 1e-11;
  // Water; only used when a trace explicitly asks for the offset.
  double baseline_susceptibility = -9.04e-6;

  bool operator==(const SystemParameters&) const = default;
};

/// The laboratory configuration used for the reported experiments.
inline SystemParameters table1_parameters() { return SystemParameters{}; }

/// Throws Error(kInvalidParameter) naming the first field that violates its
/// invariant; otherwise returns `p` unchanged.
const SystemParameters& validate_parameters(const SystemParameters& p);

/// Volume of the susceptometer's sensitive region, c_z * pi * a_rx^2.
double receiver_volume(const SystemParameters& p);

/// Non-negative exponent controlling how strongly the injected cloud is
/// concentrated on the tube axis. 0 is a uniform cross section.
class ShapeParameter {
 public:
  explicit ShapeParameter(double beta);

  double value() const noexcept { return beta_; }

  friend bool operator==(ShapeParameter, ShapeParameter) = default;

 private:
  double beta_;
};

}  // namespace mnpcomm
