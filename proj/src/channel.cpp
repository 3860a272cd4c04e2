#include "mnpcomm/channel.hpp"

#include <cmath>
#include <numbers>

#include "mnpcomm/error.hpp"
#include "mnpcomm/hydrodynamics.hpp"

namespace mnpcomm {
namespace {

void require_positive(double value, const char* what) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must be positive");
  }
}

}  // namespace

InitialDistribution::InitialDistribution(ShapeParameter beta,
                                         double tube_radius)
    : beta_(beta), a_(tube_radius) {
  require_positive(tube_radius, "tube_radius");
}

double initial_pdf(double x, double y, const InitialDistribution& dist) {
  const double a = dist.tube_radius();
  const double s = (x * x + y * y) / (a * a);
  if (!(s <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "point outside the tube");
  }
  const double beta = dist.beta();
  return (beta + 1.0) / (std::numbers::pi * a * a) * std::pow(1.0 - s, beta);
}

double radial_cdf(double rho, const InitialDistribution& dist) {
  const double a = dist.tube_radius();
  if (!(rho >= 0.0 && rho <= a)) {
    throw Error(ErrorCode::kInvalidArgument, "radius outside the tube");
  }
  const double s = (rho / a) * (rho / a);
  return 1.0 - std::pow(1.0 - s, dist.beta() + 1.0);
}

SystemResponse::SystemResponse(ShapeParameter beta, double distance,
                               double receiver_length, double center_velocity)
    : beta_(beta), d_(distance), cz_(receiver_length), v0_(center_velocity) {
  require_positive(distance, "propagation_distance");
  require_positive(receiver_length, "receiver_length");
  require_positive(center_velocity, "center_velocity");
}

SystemResponse SystemResponse::from_parameters(ShapeParameter beta,
                                               const SystemParameters& p) {
  return {beta, p.propagation_distance, p.receiver_length,
          mnpcomm::center_velocity(p)};
}

double system_response(double t, const SystemResponse& resp) {
  const double exponent = resp.beta() + 1.0;
  const double d = resp.distance();
  const double far = d + resp.receiver_length();
  const double travelled = resp.center_velocity() * t;
  if (t <= resp.arrival_time()) return 0.0;
  if (t < resp.peak_time()) return 1.0 - std::pow(d / travelled, exponent);
  return std::pow(far / travelled, exponent) -
         std::pow(d / travelled, exponent);
}

Peak peak(const SystemResponse& resp) {
  const double ratio = resp.receiver_length() / resp.distance();
  return {resp.peak_time(), 1.0 - std::pow(1.0 + ratio, -1.0 - resp.beta())};
}

double tail_time(const SystemResponse& resp, double fraction) {
  if (!(fraction > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fraction must be positive");
  }
  if (fraction >= 1.0) return resp.peak_time();
  // After the peak P(t) = P_peak * (t_peak / t)^(beta + 1).
  return resp.peak_time() * std::pow(fraction, -1.0 / (resp.beta() + 1.0));
}

double susceptibility_gain(const SystemParameters& p) {
  return p.reference_susceptibility * p.injection_volume / receiver_volume(p);
}

double susceptibility(double t, const SystemResponse& resp,
                      const SystemParameters& p, double amplitude_scale) {
  return amplitude_scale * susceptibility_gain(p) * system_response(t, resp);
}

}  // namespace mnpcomm
