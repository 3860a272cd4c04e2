#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mnpcomm {

/// Time series of susceptibility samples. Times are strictly increasing but
/// need not be uniformly spaced.
class SusceptibilityTrace {
 public:
  using Metadata = std::map<std::string, std::string>;

  SusceptibilityTrace() = default;
  SusceptibilityTrace(std::vector<double> times, std::vector<double> values,
                      Metadata metadata = {});

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> values() const noexcept { return values_; }
  const Metadata& metadata() const noexcept { return metadata_; }

  double start_time() const;
  double end_time() const;

  /// Linear interpolation between neighbouring samples. Outside the sampled
  /// range the nearest end sample is returned.
  double value_at(double t) const;

  /// Index of the largest sample; the earliest one wins ties.
  std::size_t argmax() const;

  SusceptibilityTrace shifted(double dt) const;
  SusceptibilityTrace scaled(double factor) const;
  /// Samples with window_start <= t <= window_end.
  SusceptibilityTrace window(double window_start, double window_end) const;

  bool operator==(const SusceptibilityTrace&) const = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  Metadata metadata_;
};

}  // namespace mnpcomm
