#include "mnpcomm/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mnpcomm/error.hpp"
#include "mnpcomm/hydrodynamics.hpp"
#include "mnpcomm/modem.hpp"

namespace mnpcomm {
namespace {

constexpr double kInvPhi = 0.6180339887498949;  // 1 / golden ratio
constexpr double kFlatTolerance = 1e-12;
constexpr double kShiftTolerance = 1e-10;
constexpr int kShiftGrid = 9;

struct ProfilePoint {
  double sse;
  double shift;
  double amplitude;
};

// Golden-section search for the minimum of f on [lo, hi]. Returns the best
// abscissa seen and the number of iterations taken.
template <typename F>
std::pair<double, int> golden_section(F&& f, double lo, double hi,
                                      double tolerance) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  int iterations = 0;
  while (hi - lo > tolerance) {
    ++iterations;
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return {f1 <= f2 ? x1 : x2, iterations};
}

class Objective {
 public:
  Objective(const SusceptibilityTrace& window, const SystemParameters& p,
            const FitOptions& options, double shift, double spacing)
      : window_(window),
        p_(p),
        options_(options),
        shift_(shift),
        spacing_(spacing) {}

  ProfilePoint at(double beta, double shift) const {
    const ShapeParameter b(beta);
    const double amp =
        options_.free_amplitude ? best_amplitude(window_, p_, b, shift) : 1.0;
    return {residual_sse(window_, p_, b, shift, amp), shift, amp};
  }

  // Minimum over the shift for a fixed beta.
  ProfilePoint profile(double beta) const {
    if (!options_.refine_shift || spacing_ <= 0.0) return at(beta, shift_);
    const double lo = shift_ - spacing_;
    const double step = 2.0 * spacing_ / (kShiftGrid - 1);
    ProfilePoint best = at(beta, shift_);
    int best_k = (kShiftGrid - 1) / 2;
    for (int k = 0; k < kShiftGrid; ++k) {
      if (k == best_k) continue;
      const auto cand = at(beta, lo + step * k);
      if (cand.sse < best.sse) {
        best = cand;
        best_k = k;
      }
    }
    const double a = lo + step * std::max(0, best_k - 1);
    const double b = lo + step * std::min(kShiftGrid - 1, best_k + 1);
    const double x = golden_section(
        [&](double s) { return at(beta, s).sse; }, a, b, kShiftTolerance).first;
    const auto refined = at(beta, x);
    return refined.sse < best.sse ? refined : best;
  }

 private:
  const SusceptibilityTrace& window_;
  const SystemParameters& p_;
  const FitOptions& options_;
  double shift_;
  double spacing_;
};

double model_peak_time(const SystemParameters& p) {
  return SystemResponse::from_parameters(ShapeParameter(0.0), p).peak_time();
}

}  // namespace

double align_by_peak(const SusceptibilityTrace& trace,
                     const SystemResponse& resp) {
  const std::size_t k = trace.argmax();
  const auto v = trace.values();
  std::size_t near_max = 0;
  for (double x : v) {
    if (x >= v[k] - kFlatTolerance) ++near_max;
  }
  if (near_max > 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "trace maximum is not unique; cannot align");
  }
  return resp.peak_time() - trace.times()[k];
}

double residual_sse(const SusceptibilityTrace& trace,
                    const SystemParameters& p, ShapeParameter beta,
                    double time_shift, double amplitude) {
  const auto resp = SystemResponse::from_parameters(beta, p);
  const double gain = amplitude * susceptibility_gain(p);
  const auto t = trace.times();
  const auto v = trace.values();
  double sse = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double r = gain * system_response(t[i] + time_shift, resp) - v[i];
    sse += r * r;
  }
  return sse;
}

double best_amplitude(const SusceptibilityTrace& trace,
                      const SystemParameters& p, ShapeParameter beta,
                      double time_shift) {
  const auto resp = SystemResponse::from_parameters(beta, p);
  const double gain = susceptibility_gain(p);
  const auto t = trace.times();
  const auto v = trace.values();
  double mm = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double m = gain * system_response(t[i] + time_shift, resp);
    mm += m * m;
    my += m * v[i];
  }
  return mm > 0.0 ? my / mm : 1.0;
}

SusceptibilityTrace fit_window(const SusceptibilityTrace& trace,
                               const SystemParameters& p,
                               const FitOptions& options) {
  if (trace.empty()) throw Error(ErrorCode::kInvalidArgument, "empty trace");
  for (double x : trace.values()) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidArgument, "trace has non-finite samples");
    }
  }
  SusceptibilityTrace scope = trace;
  if (options.window) {
    const auto [w0, w1] = *options.window;
    if (!(w1 > w0)) {
      throw Error(ErrorCode::kInvalidArgument, "fit window is empty");
    }
    scope = trace.window(w0, w1);
    if (scope.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "fit window holds no samples");
    }
  }

  const auto v = scope.values();
  const double level = options.threshold.value_or(0.5 * v[scope.argmax()]);
  std::size_t first = scope.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < scope.size(); ++i) {
    if (v[i] > level) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == scope.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "fit window contains no above-threshold data");
  }
  if (options.window) return scope;

  const double t_peak = model_peak_time(p);
  const auto t = scope.times();
  return scope.window(t[first] - 2.0 * t_peak, t[last] + 5.0 * t_peak);
}

FitResult fit_beta(const SusceptibilityTrace& trace, const SystemParameters& p,
                   const FitOptions& options) {
  validate_parameters(p);
  if (!(options.beta_max > 0.0) || options.grid_points < 2 ||
      !(options.beta_tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid fit options");
  }
  const auto window = fit_window(trace, p, options);
  if (window.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "fit needs at least 2 samples");
  }

  // The model peak time does not depend on beta, so one alignment serves
  // every candidate.
  const auto resp0 = SystemResponse::from_parameters(ShapeParameter(0.0), p);
  const double shift = align_by_peak(window, resp0);
  const std::size_t k = window.argmax();
  const auto t = window.times();
  double spacing = 0.0;
  if (k > 0) spacing = std::max(spacing, t[k] - t[k - 1]);
  if (k + 1 < window.size()) spacing = std::max(spacing, t[k + 1] - t[k]);

  const Objective objective(window, p, options, shift, spacing);

  const int n = options.grid_points;
  const double step = options.beta_max / (n - 1);
  double best_beta = 0.0;
  ProfilePoint best{std::numeric_limits<double>::infinity(), shift, 1.0};
  int best_k = 0;
  for (int i = 0; i < n; ++i) {
    const double beta = step * i;
    const auto cand = objective.profile(beta);
    if (cand.sse < best.sse) {
      best = cand;
      best_beta = beta;
      best_k = i;
    }
  }

  const double lo = step * std::max(0, best_k - 1);
  const double hi = std::min(options.beta_max, step * (best_k + 1));
  const auto [beta_refined, iterations] = golden_section(
      [&](double b) { return objective.profile(b).sse; }, lo, hi,
      options.beta_tolerance);
  const auto refined = objective.profile(beta_refined);
  if (refined.sse <= best.sse) {
    best = refined;
    best_beta = beta_refined;
  }

  FitResult out;
  out.beta_hat = best_beta;
  out.time_shift = best.shift;
  out.amplitude_scale = best.amplitude;
  out.residual_sse = best.sse;
  out.iterations = iterations;
  // A minimiser pinned at the upper bound means the bound was too tight.
  out.converged = best_beta < options.beta_max - options.beta_tolerance;
  out.window_start = window.start_time();
  out.window_end = window.end_time();
  return out;
}

SusceptibilityTrace average_pulses(const SusceptibilityTrace& trace,
                                   double threshold, std::size_t count,
                                   double merge_gap) {
  if (count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "pulse count must be >= 1");
  }
  const auto peaks = detect_peaks(trace, threshold, merge_gap);
  if (peaks.size() < count) {
    throw Error(ErrorCode::kInvalidArgument,
                "found " + std::to_string(peaks.size()) + " pulses, need " +
                    std::to_string(count));
  }
  if (count == 1) return trace;

  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < count; ++i) {
    gap = std::min(gap, peaks[i] - peaks[i - 1]);
  }
  const double p0 = peaks.front();
  const auto segment = trace.window(p0 - 0.25 * gap, p0 + 0.75 * gap);

  std::vector<double> times(segment.times().begin(), segment.times().end());
  std::vector<double> values(times.size(), 0.0);
  for (std::size_t j = 0; j < times.size(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      sum += trace.value_at(times[j] - p0 + peaks[i]);
    }
    values[j] = sum / static_cast<double>(count);
  }
  auto meta = trace.metadata();
  meta["averaged_pulses"] = std::to_string(count);
  return {std::move(times), std::move(values), std::move(meta)};
}

}  // namespace mnpcomm
