#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mnpcomm {

inline constexpr std::size_t kBitsPerChar = 8;
inline constexpr std::array<std::uint8_t, 3> kSyncPrefix{0, 1, 0};
/// Data bits are sampled at t0 + T + k*T for these k.
inline constexpr std::array<int, 5> kDataBitOffsets{1, 2, 3, 4, 5};

class BitSequence {
 public:
  BitSequence() = default;
  explicit BitSequence(std::vector<std::uint8_t> bits);
  BitSequence(std::initializer_list<int> bits);

  /// Parses a string of '0'/'1' characters; commas and whitespace are
  /// skipped.
  static BitSequence parse(const std::string& text);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  void push_back(bool bit) { bits_.push_back(bit ? 1 : 0); }
  std::string to_string() const;

  bool operator==(const BitSequence&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

enum class SyncPolicy {
  // t0 is the first detected peak, as in the offline decoder.
  kFirstPeak,
  // The first peak gives a coarse t0 which is then refined by locating the
  // maximum of the prefix pulses folded at the 8T character period.
  kFoldedPrefix,
};

struct DetectionConfig {
  double threshold = 0.0;
  double symbol_duration = 4.0;
  SyncPolicy sync_policy = SyncPolicy::kFoldedPrefix;
  /// Above-threshold excursions separated by less than this are one peak.
  /// Negative means "half a symbol duration".
  double peak_merge_gap = -1.0;

  double effective_merge_gap() const {
    return peak_merge_gap < 0.0 ? 0.5 * symbol_duration : peak_merge_gap;
  }
};

void validate_detection_config(const DetectionConfig& cfg);

}  // namespace mnpcomm
