#include "mnpcomm/hydrodynamics.hpp"

#include <cmath>
#include <numbers>

#include "mnpcomm/error.hpp"

namespace mnpcomm {

FlowField::FlowField(double center_velocity, double tube_radius)
    : v0_(center_velocity), a_(tube_radius) {
  if (!(v0_ > 0.0) || !(a_ > 0.0) || !std::isfinite(v0_) ||
      !std::isfinite(a_)) {
    throw Error(ErrorCode::kInvalidArgument,
                "flow field needs positive velocity and radius");
  }
}

FlowField FlowField::from_parameters(const SystemParameters& p) {
  return {mnpcomm::center_velocity(p), p.tube_radius};
}

double velocity_at(double r, const FlowField& field) {
  const double a = field.tube_radius();
  if (!(r >= 0.0 && r <= a)) {
    throw Error(ErrorCode::kInvalidArgument, "radius outside the tube");
  }
  const double s = r / a;
  return field.center_velocity() * (1.0 - s * s);
}

double effective_velocity(const SystemParameters& p) {
  return p.background_flow_rate /
         (std::numbers::pi * p.tube_radius * p.tube_radius);
}

double center_velocity(const SystemParameters& p) {
  return 2.0 * effective_velocity(p);
}

ReynoldsResult reynolds_number(const SystemParameters& p) {
  const double re =
      2.0 * p.tube_radius * effective_velocity(p) / p.kinematic_viscosity;
  return {re, re < kLaminarReynoldsLimit};
}

PecletResult peclet_number(const SystemParameters& p) {
  const double pe =
      p.tube_radius * effective_velocity(p) / p.diffusion_coefficient;
  const double ratio = p.propagation_distance / p.tube_radius;
  return {pe, ratio, pe > ratio};
}

}  // namespace mnpcomm
