#include "mnpcomm/trace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mnpcomm/error.hpp"

namespace mnpcomm {

SusceptibilityTrace::SusceptibilityTrace(std::vector<double> times,
                                         std::vector<double> values,
                                         Metadata metadata)
    : times_(std::move(times)),
      values_(std::move(values)),
      metadata_(std::move(metadata)) {
  if (times_.size() != values_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "trace times and values differ in length");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "trace time at sample " + std::to_string(i) +
                      " is not finite");
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "trace times not strictly increasing at sample " +
                      std::to_string(i));
    }
  }
}

double SusceptibilityTrace::start_time() const {
  if (empty()) throw Error(ErrorCode::kInvalidArgument, "empty trace");
  return times_.front();
}

double SusceptibilityTrace::end_time() const {
  if (empty()) throw Error(ErrorCode::kInvalidArgument, "empty trace");
  return times_.back();
}

double SusceptibilityTrace::value_at(double t) const {
  if (empty()) throw Error(ErrorCode::kInvalidArgument, "empty trace");
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

std::size_t SusceptibilityTrace::argmax() const {
  if (empty()) throw Error(ErrorCode::kInvalidArgument, "empty trace");
  return static_cast<std::size_t>(
      std::max_element(values_.begin(), values_.end()) - values_.begin());
}

SusceptibilityTrace SusceptibilityTrace::shifted(double dt) const {
  auto times = times_;
  for (auto& t : times) t += dt;
  return {std::move(times), values_, metadata_};
}

SusceptibilityTrace SusceptibilityTrace::scaled(double factor) const {
  auto values = values_;
  for (auto& v : values) v *= factor;
  return {times_, std::move(values), metadata_};
}

SusceptibilityTrace SusceptibilityTrace::window(double window_start,
                                                double window_end) const {
  std::vector<double> times;
  std::vector<double> values;
  for (std::size_t i = 0; i < size(); ++i) {
    if (times_[i] >= window_start && times_[i] <= window_end) {
      times.push_back(times_[i]);
      values.push_back(values_[i]);
    }
  }
  return {std::move(times), std::move(values), metadata_};
}

}  // namespace mnpcomm
