#include "mnpcomm/parameters.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mnpcomm/error.hpp"

namespace mnpcomm {
namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                std::string(name) + " must be positive");
  }
}

}  // namespace

const SystemParameters& validate_parameters(const SystemParameters& p) {
  require_positive(p.tube_radius, "tube_radius");
  require_positive(p.injection_tube_radius, "injection_tube_radius");
  require_positive(p.receiver_radius, "receiver_radius");
  require_positive(p.receiver_length, "receiver_length");
  require_positive(p.propagation_distance, "propagation_distance");
  require_positive(p.background_flow_rate, "background_flow_rate");
  require_positive(p.injection_flow_rate, "injection_flow_rate");
  require_positive(p.injection_volume, "injection_volume");
  require_positive(p.symbol_duration, "symbol_duration");
  require_positive(p.reference_susceptibility, "reference_susceptibility");
  require_positive(p.kinematic_viscosity, "kinematic_viscosity");
  require_positive(p.diffusion_coefficient, "diffusion_coefficient");
  if (!std::isfinite(p.baseline_susceptibility)) {
    throw Error(ErrorCode::kInvalidParameter,
                "baseline_susceptibility must be finite");
  }
  return p;
}

double receiver_volume(const SystemParameters& p) {
  return p.receiver_length * std::numbers::pi * p.receiver_radius *
         p.receiver_radius;
}

ShapeParameter::ShapeParameter(double beta) : beta_(beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "beta must be a finite non-negative number");
  }
}

}  // namespace mnpcomm
