#pragma once

#include "mnpcomm/parameters.hpp"

namespace mnpcomm {

/// Reynolds number above which duct flow is no longer assumed laminar.
inline constexpr double kLaminarReynoldsLimit = 2100.0;

/// Poiseuille profile in a circular tube.
class FlowField {
 public:
  FlowField(double center_velocity, double tube_radius);

  /// Field for the background flow; the centre velocity is twice the
  /// area-averaged velocity.
  static FlowField from_parameters(const SystemParameters& p);

  double center_velocity() const noexcept { return v0_; }
  double tube_radius() const noexcept { return a_; }
  double mean_velocity() const noexcept { return 0.5 * v0_; }

 private:
  double v0_;
  double a_;
};

/// v0 * (1 - r^2/a^2); throws for r outside [0, a].
double velocity_at(double r, const FlowField& field);

double effective_velocity(const SystemParameters& p);
double center_velocity(const SystemParameters& p);

struct ReynoldsResult {
  double value;
  bool laminar;
};

ReynoldsResult reynolds_number(const SystemParameters& p);

struct PecletResult {
  double value;
  double length_ratio;  // d / a
  bool flow_dominated;  // Pe > d/a
};

PecletResult peclet_number(const SystemParameters& p);

}  // namespace mnpcomm
