#pragma once

#include <cstdint>
#include <string_view>

namespace mnpcomm {

/// Counter-based generator: the i-th draw of stream s under seed k is
/// splitmix64_mix(key(k, s) + (i + 1) * golden_gamma). Any draw can be
/// produced independently, so parallel consumers reproduce serial output.
class CounterRng {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64-counter-v1";

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const noexcept;
  /// Standard normal via Box-Muller on draws (2i, 2i + 1); uses the cosine
  /// branch only.
  double normal(std::uint64_t index) const noexcept;

 private:
  std::uint64_t key_;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace mnpcomm
