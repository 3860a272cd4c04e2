#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "mnpcomm/channel.hpp"
#include "mnpcomm/parameters.hpp"
#include "mnpcomm/trace.hpp"

namespace mnpcomm {

/// Shift that moves the trace's maximum sample onto the model peak time:
/// model_peak_time - t_max(trace). Throws if the maximum is not unique.
double align_by_peak(const SusceptibilityTrace& trace,
                     const SystemResponse& resp);

struct FitOptions {
  double beta_max = 50.0;
  int grid_points = 200;
  // Width of the final golden-section bracket. 1e-6 already meets the
  // 1e-3 recovery target; the tighter default keeps the noiseless residual
  // at rounding level.
  double beta_tolerance = 1e-10;
  bool free_amplitude = false;
  // Refine the peak alignment within +-1 sample period around the shift
  // found by align_by_peak.
  bool refine_shift = true;
  std::optional<std::pair<double, double>> window;
  // Level that defines the pulse for automatic windowing. Defaults to half
  // of the largest sample.
  std::optional<double> threshold;
};

struct FitResult {
  double beta_hat = 0.0;
  double time_shift = 0.0;
  double amplitude_scale = 1.0;
  double residual_sse = 0.0;
  int iterations = 0;
  bool converged = false;
  double window_start = 0.0;
  double window_end = 0.0;
};

/// Sum over samples of (A * chi_model(t_i + shift; beta) - chi_i)^2.
double residual_sse(const SusceptibilityTrace& trace,
                    const SystemParameters& p, ShapeParameter beta,
                    double time_shift, double amplitude = 1.0);

/// Amplitude minimising residual_sse for fixed beta and shift.
double best_amplitude(const SusceptibilityTrace& trace,
                      const SystemParameters& p, ShapeParameter beta,
                      double time_shift);

/// Samples used by fit_beta: the explicit window, or the automatic one
/// spanning 2 peak times before the first above-threshold sample to 5 peak
/// times after the last.
SusceptibilityTrace fit_window(const SusceptibilityTrace& trace,
                               const SystemParameters& p,
                               const FitOptions& options);

FitResult fit_beta(const SusceptibilityTrace& trace, const SystemParameters& p,
                   const FitOptions& options = {});

/// Mean of the first `count` pulses, each re-timed so its peak coincides
/// with the first pulse's peak. Returned on the first pulse's sample grid.
SusceptibilityTrace average_pulses(const SusceptibilityTrace& trace,
                                   double threshold, std::size_t count,
                                   double merge_gap);

}  // namespace mnpcomm
