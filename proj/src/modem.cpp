#include "mnpcomm/modem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mnpcomm/error.hpp"
#include "mnpcomm/io.hpp"
#include "mnpcomm/random.hpp"

namespace mnpcomm {
namespace {

constexpr std::uint64_t kAdditiveNoiseStream = 1;
constexpr std::uint64_t kJitterStream = 2;
constexpr std::uint64_t kJitterAttempts = 64;
constexpr double kTailFraction = 0.01;

void require_nonnegative(double value, const char* what) {
  if (!std::isfinite(value) || value < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must be non-negative");
  }
}

// Truncated at +-3 by rejection; the attempt budget is never exhausted in
// practice (p = 0.0027^64).
double truncated_normal(const CounterRng& rng, std::uint64_t index) {
  for (std::uint64_t attempt = 0; attempt < kJitterAttempts; ++attempt) {
    const double z = rng.normal(index * kJitterAttempts + attempt);
    if (std::abs(z) <= 3.0) return z;
  }
  return 0.0;
}

}  // namespace

BitSequence encode_text(std::string_view message) {
  BitSequence bits;
  for (std::size_t i = 0; i < message.size(); ++i) {
    const char c = message[i];
    if (c < 'A' || c > 'Z') {
      throw Error(ErrorCode::kInvalidArgument,
                  "character " + std::to_string(i) +
                      " is not a capital letter A-Z");
    }
    const auto code = static_cast<unsigned>(c);
    for (int b = 7; b >= 0; --b) bits.push_back(((code >> b) & 1u) != 0);
  }
  return bits;
}

std::string decode_bits(const BitSequence& bits) {
  if (bits.size() % kBitsPerChar != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "bit count " + std::to_string(bits.size()) +
                    " is not a multiple of 8");
  }
  std::string text;
  for (std::size_t j = 0; j < bits.size() / kBitsPerChar; ++j) {
    const std::size_t base = j * kBitsPerChar;
    for (std::size_t i = 0; i < kSyncPrefix.size(); ++i) {
      if (bits[base + i] != kSyncPrefix[i]) {
        throw Error(ErrorCode::kInvalidArgument,
                    "prefix violation at character " + std::to_string(j));
      }
    }
    unsigned code = 0;
    for (std::size_t i = 0; i < kBitsPerChar; ++i) {
      code = (code << 1) | bits[base + i];
    }
    text.push_back(static_cast<char>(code));
  }
  return text;
}

std::vector<Injection> injection_schedule(const BitSequence& bits,
                                          double symbol_duration) {
  std::vector<Injection> out;
  out.reserve(bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k) {
    out.push_back({k, bits[k], static_cast<double>(k) * symbol_duration});
  }
  return out;
}

std::vector<double> pulse_gains(const NoiseModel& noise, std::size_t count) {
  require_nonnegative(noise.amplitude_jitter_sigma, "amplitude_jitter_sigma");
  std::vector<double> gains(count, 1.0);
  if (noise.amplitude_jitter_sigma == 0.0) return gains;
  const CounterRng rng(noise.rng_seed, kJitterStream);
  for (std::size_t k = 0; k < count; ++k) {
    gains[k] += noise.amplitude_jitter_sigma * truncated_normal(rng, k);
  }
  return gains;
}

SusceptibilityTrace synthesize_trace(const BitSequence& bits,
                                     const SystemParameters& p,
                                     ShapeParameter beta,
                                     const NoiseModel& noise,
                                     const SynthesisOptions& options) {
  validate_parameters(p);
  if (!std::isfinite(options.sample_rate) || !(options.sample_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sample_rate must be positive");
  }
  require_nonnegative(noise.additive_sigma, "additive_sigma");

  const auto resp = SystemResponse::from_parameters(beta, p);
  const double T = p.symbol_duration;
  const double rate = options.sample_rate;
  const double duration = static_cast<double>(bits.size() + 2) * T +
                          tail_time(resp, kTailFraction);
  const auto count = static_cast<std::size_t>(std::floor(duration * rate)) + 1;

  std::vector<double> times(count);
  for (std::size_t i = 0; i < count; ++i) {
    times[i] = static_cast<double>(i) / rate;
  }

  const double amplitude = options.amplitude_scale * susceptibility_gain(p);
  const auto gains = pulse_gains(noise, bits.size());
  std::vector<double> values(count, 0.0);

  // When T spans a whole number of samples every pulse sees the same
  // relative grid and the response is evaluated once.
  const double samples_per_symbol = T * rate;
  const bool aligned =
      std::abs(samples_per_symbol - std::round(samples_per_symbol)) < 1e-9;
  std::vector<double> unit;
  if (aligned) {
    unit.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      unit[i] = system_response(times[i], resp);
    }
  }
  const auto stride = static_cast<std::size_t>(std::round(samples_per_symbol));

  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] == 0) continue;
    const double weight = amplitude * gains[k];
    const double t_inject = static_cast<double>(k) * T;
    if (aligned) {
      const std::size_t offset = k * stride;
      for (std::size_t i = offset; i < count; ++i) {
        values[i] += weight * unit[i - offset];
      }
    } else {
      const auto first = static_cast<std::size_t>(
          std::max(0.0, std::floor((t_inject + resp.arrival_time()) * rate)));
      for (std::size_t i = first; i < count; ++i) {
        values[i] += weight * system_response(times[i] - t_inject, resp);
      }
    }
  }

  if (noise.additive_sigma > 0.0) {
    const CounterRng rng(noise.rng_seed, kAdditiveNoiseStream);
    for (std::size_t i = 0; i < count; ++i) {
      values[i] += noise.additive_sigma * rng.normal(i);
    }
  }
  if (options.water_offset) {
    for (auto& v : values) v += p.baseline_susceptibility;
  }

  SusceptibilityTrace::Metadata meta{
      {"beta", format_double(beta.value())},
      {"sample_rate_hz", format_double(rate)},
      {"rng_algorithm", std::string(CounterRng::kAlgorithm)},
      {"rng_seed", std::to_string(noise.rng_seed)},
  };
  return {std::move(times), std::move(values), std::move(meta)};
}

double min_pulse_peak(const BitSequence& bits, const SystemParameters& p,
                      ShapeParameter beta, const NoiseModel& noise,
                      double amplitude_scale) {
  const auto resp = SystemResponse::from_parameters(beta, p);
  const double single =
      amplitude_scale * susceptibility_gain(p) * peak(resp).value;
  const auto gains = pulse_gains(noise, bits.size());
  double lowest = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] == 0) continue;
    const double h = single * gains[k];
    lowest = any ? std::min(lowest, h) : h;
    any = true;
  }
  return lowest;
}

std::vector<double> detect_peaks(const SusceptibilityTrace& trace,
                                 double threshold, double merge_gap) {
  if (trace.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty trace");
  }
  if (!std::isfinite(threshold) || !(threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
  }
  const auto t = trace.times();
  const auto v = trace.values();

  std::vector<double> peaks;
  bool open = false;        // inside an excursion (possibly merged)
  std::size_t best = 0;     // index of the excursion maximum
  double last_above = 0.0;  // time of the last above-threshold sample
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!(v[i] > threshold)) continue;
    if (open && t[i] - last_above >= merge_gap &&
        i > 0 && !(v[i - 1] > threshold)) {
      peaks.push_back(t[best]);
      open = false;
    }
    if (!open) {
      open = true;
      best = i;
    } else if (v[i] > v[best]) {
      best = i;
    }
    last_above = t[i];
  }
  if (open) peaks.push_back(t[best]);
  return peaks;
}

DecodedMessage decode_trace(const SusceptibilityTrace& trace,
                            const DetectionConfig& cfg) {
  validate_detection_config(cfg);
  const double T = cfg.symbol_duration;
  const double period = static_cast<double>(kBitsPerChar) * T;
  const auto peaks =
      detect_peaks(trace, cfg.threshold, cfg.effective_merge_gap());
  if (peaks.empty()) {
    throw Error(ErrorCode::kNoSynchronization, "no synchronization");
  }
  const double end = trace.end_time();
  auto prefix_present = [&](double s) {
    return trace.value_at(s) > cfg.threshold;
  };

  // Characters whose prefix pulse is visible at the coarse sync times.
  double t0 = peaks.front();
  std::size_t chars = 0;
  while (t0 + period * static_cast<double>(chars) <= end &&
         (chars == 0 ||
          prefix_present(t0 + period * static_cast<double>(chars)))) {
    ++chars;
  }

  if (cfg.sync_policy == SyncPolicy::kFoldedPrefix) {
    const auto times = trace.times();
    const auto lo = std::lower_bound(times.begin(), times.end(), t0 - 0.25 * T);
    const auto hi = std::upper_bound(times.begin(), times.end(), t0 + 0.25 * T);
    double best_score = 0.0;
    double best_t = t0;
    bool first = true;
    for (auto it = lo; it != hi; ++it) {
      double score = 0.0;
      for (std::size_t j = 0; j < chars; ++j) {
        score += trace.value_at(*it + period * static_cast<double>(j));
      }
      if (first || score > best_score) {
        best_score = score;
        best_t = *it;
        first = false;
      }
    }
    t0 = best_t;
  }

  DecodedMessage out;
  for (std::size_t j = 0;; ++j) {
    const double s = t0 + period * static_cast<double>(j);
    if (s > end) break;
    if (j > 0 && !prefix_present(s)) break;
    const double last = s + T * static_cast<double>(kDataBitOffsets.back());
    if (last > end) {
      throw Error(ErrorCode::kPartialCharacter,
                  "trace ends inside character " + std::to_string(j) + " (" +
                      std::to_string(j) + " complete characters)");
    }
    out.sync_times.push_back(s);
    for (std::size_t i = 0; i < kBitsPerChar; ++i) {
      // Bit i of a character is centred at s + (i - 1) T.
      const double at = s + (static_cast<double>(i) - 1.0) * T;
      const double margin = trace.value_at(at) - cfg.threshold;
      out.per_bit_margins.push_back(margin);
      if (i < kSyncPrefix.size()) {
        out.bits.push_back(kSyncPrefix[i] != 0);
      } else {
        out.bits.push_back(margin > 0.0);
      }
    }
  }
  out.text = decode_bits(out.bits);
  return out;
}

}  // namespace mnpcomm
