#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mnpcomm/bits.hpp"
#include "mnpcomm/channel.hpp"
#include "mnpcomm/parameters.hpp"
#include "mnpcomm/trace.hpp"

namespace mnpcomm {

/// 8-bit ASCII, most significant bit first. Only 'A'..'Z' are accepted, so
/// every character starts with the 0,1,0 sync prefix.
BitSequence encode_text(std::string_view message);

/// Inverse of encode_text. Throws on a length that is not a multiple of 8
/// or on a prefix violation. Codes 64..95 that are not letters ('@', '[',
/// ...) decode to their ASCII character.
std::string decode_bits(const BitSequence& bits);

struct Injection {
  std::size_t symbol_index;
  std::uint8_t bit;
  double time;  // start of the symbol interval
};

std::vector<Injection> injection_schedule(const BitSequence& bits,
                                          double symbol_duration);

struct NoiseModel {
  double additive_sigma = 0.0;
  // Relative std-dev of the per-pulse gain 1 + jitter; jitter is Gaussian
  // truncated at +-3 sigma.
  double amplitude_jitter_sigma = 0.0;
  std::uint64_t rng_seed = 0;
};

struct SynthesisOptions {
  double sample_rate = 50.0;  // Hz
  double amplitude_scale = 1.0;
  bool water_offset = false;
};

/// Gain applied to the pulse of symbol k, for k < count.
std::vector<double> pulse_gains(const NoiseModel& noise, std::size_t count);

/// Superposition of shifted single-injection responses plus i.i.d.
/// Gaussian noise, sampled at t = i / sample_rate from 0 through
/// (n + 2) T + (time for a pulse to decay to 1% of its peak).
SusceptibilityTrace synthesize_trace(const BitSequence& bits,
                                     const SystemParameters& p,
                                     ShapeParameter beta,
                                     const NoiseModel& noise,
                                     const SynthesisOptions& options = {});

/// Smallest noiseless pulse peak among the transmitted ones (0 if none).
double min_pulse_peak(const BitSequence& bits, const SystemParameters& p,
                      ShapeParameter beta, const NoiseModel& noise,
                      double amplitude_scale = 1.0);

/// One time per maximal above-threshold excursion: the earliest sample at
/// the excursion maximum. Excursions separated by less than `merge_gap`
/// seconds are treated as one.
std::vector<double> detect_peaks(const SusceptibilityTrace& trace,
                                 double threshold, double merge_gap = 0.0);

struct DecodedMessage {
  BitSequence bits;
  std::string text;
  std::vector<double> sync_times;
  // chi(t) - threshold at each bit's sampling instant t0 + (i - 1) T.
  std::vector<double> per_bit_margins;
};

DecodedMessage decode_trace(const SusceptibilityTrace& trace,
                            const DetectionConfig& cfg);

}  // namespace mnpcomm
