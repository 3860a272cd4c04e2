#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "mnpcomm/error.hpp"
#include "mnpcomm/modem.hpp"

using namespace mnpcomm;

namespace {

// Transmitted sequence shown for the three-character example transmission.
const BitSequence kExampleBits{0, 1, 0, 0, 0, 1, 1, 0, 0, 1, 0, 0,
                               0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};

std::string random_message(std::mt19937_64& gen, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<int> letter(0, 25);
  std::string m(len(gen), 'A');
  for (auto& c : m) c = static_cast<char>('A' + letter(gen));
  return m;
}

DetectionConfig half_peak_config(const BitSequence& bits, double beta,
                                 const NoiseModel& noise = {}) {
  DetectionConfig cfg;
  cfg.threshold = 0.5 * min_pulse_peak(bits, table1_parameters(),
                                       ShapeParameter(beta), noise);
  cfg.symbol_duration = table1_parameters().symbol_duration;
  return cfg;
}

ErrorCode error_code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("encode text") {
  CHECK(encode_text("FAU") == kExampleBits);
  CHECK(encode_text("A") == BitSequence({0, 1, 0, 0, 0, 0, 0, 1}));
  CHECK(encode_text("").empty());
  CHECK_THROWS_AS(encode_text("a"), Error);
  CHECK_THROWS_AS(encode_text("AB C"), Error);
  CHECK_THROWS_AS(encode_text("@"), Error);

  for (char c = 'A'; c <= 'Z'; ++c) {
    const auto bits = encode_text(std::string(1, c));
    CHECK(bits[0] == 0);
    CHECK(bits[1] == 1);
    CHECK(bits[2] == 0);
  }
}

TEST_CASE("decode bits") {
  CHECK(decode_bits(kExampleBits) == "FAU");
  CHECK(decode_bits(BitSequence{}).empty());
  try {
    decode_bits(BitSequence{1, 1, 0, 0, 0, 0, 0, 1});
    FAIL("expected prefix violation");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "prefix violation at character 0");
  }
  CHECK_THROWS_AS(decode_bits(BitSequence{0, 1, 0}), Error);
}

TEST_CASE("text round-trip") {
  std::mt19937_64 gen(7);
  for (int i = 0; i < 500; ++i) {
    const auto m = random_message(gen, 8);
    CHECK(decode_bits(encode_text(m)) == m);
  }
}

TEST_CASE("injection schedule") {
  const auto sched = injection_schedule(encode_text("A"), 4.0);
  REQUIRE(sched.size() == 8);
  CHECK(sched[1].bit == 1);
  CHECK(sched[1].time == 4.0);
  CHECK(sched[7].symbol_index == 7);
  CHECK(sched[7].time == 28.0);
}

TEST_CASE("synthesis without injections is identically zero") {
  const auto trace = synthesize_trace(BitSequence{0, 0, 0, 0},
                                      table1_parameters(), ShapeParameter(1.1),
                                      {});
  CHECK(trace.size() > 0);
  for (double v : trace.values()) CHECK(v == 0.0);
}

TEST_CASE("single pulse equals the shifted closed-form response") {
  const auto p = table1_parameters();
  for (double rate : {50.0, 37.0}) {
    const auto trace = synthesize_trace(BitSequence{0, 0, 1}, p,
                                        ShapeParameter(1.1), {}, {rate});
    const auto resp = SystemResponse::from_parameters(ShapeParameter(1.1), p);
    double max_rel = 0.0;
    const double scale = susceptibility(resp.peak_time(), resp, p);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const double t = trace.times()[i];
      const double expect = susceptibility(t - 2.0 * p.symbol_duration, resp, p);
      max_rel = std::max(max_rel, std::abs(trace.values()[i] - expect) / scale);
    }
    CAPTURE(rate);
    CHECK(max_rel < 1e-12);
    // Duration covers (n + 2) T plus the 1% tail.
    CHECK(trace.end_time() >= 5.0 * p.symbol_duration + tail_time(resp, 0.01) -
                                  1.0 / rate);
  }
}

TEST_CASE("example sequence: local maxima sit at kT + t_peak") {
  const auto p = table1_parameters();
  const double rate = 50.0;
  const auto trace =
      synthesize_trace(kExampleBits, p, ShapeParameter(1.1), {}, {rate});
  const auto resp = SystemResponse::from_parameters(ShapeParameter(1.1), p);
  const auto peaks = detect_peaks(trace, 0.5 * min_pulse_peak(
                                             kExampleBits, p, ShapeParameter(1.1), {}));
  std::vector<double> expected;
  for (std::size_t k = 0; k < kExampleBits.size(); ++k) {
    if (kExampleBits[k]) {
      expected.push_back(static_cast<double>(k) * p.symbol_duration +
                         resp.peak_time());
    }
  }
  REQUIRE(peaks.size() == expected.size());
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    CHECK(std::abs(peaks[i] - expected[i]) <= 1.0 / rate);
  }
}

TEST_CASE("jitter gains") {
  NoiseModel noise;
  noise.amplitude_jitter_sigma = 0.1;
  noise.rng_seed = 3;
  const auto g = pulse_gains(noise, 10'000);
  double mean = 0.0;
  for (double x : g) {
    CHECK(std::abs(x - 1.0) <= 0.3 + 1e-15);
    mean += x;
  }
  CHECK(std::abs(mean / g.size() - 1.0) < 0.005);
  CHECK(pulse_gains(noise, 10) == pulse_gains(noise, 10));
  CHECK(pulse_gains({}, 3) == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("peak detection") {
  const auto p = table1_parameters();
  const auto zero = synthesize_trace(BitSequence{0, 0}, p, ShapeParameter(1.1), {});
  CHECK(detect_peaks(zero, 1e-6).empty());
  CHECK_THROWS_AS(detect_peaks(SusceptibilityTrace{}, 1e-6), Error);
  CHECK_THROWS_AS(detect_peaks(zero, 0.0), Error);

  const auto resp = SystemResponse::from_parameters(ShapeParameter(1.1), p);
  const auto single = synthesize_trace(BitSequence{0, 1}, p, ShapeParameter(1.1), {});
  const double half = 0.5 * susceptibility(resp.peak_time(), resp, p);
  const auto one = detect_peaks(single, half);
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0] - (p.symbol_duration + resp.peak_time())) <= 0.02);

  const auto pair = synthesize_trace(BitSequence{1, 0, 1}, p, ShapeParameter(1.1), {});
  CHECK(detect_peaks(pair, half).size() == 2);

  // Two excursions 3 samples apart merge only when the gap allows it.
  const SusceptibilityTrace dip({0, 1, 2, 3, 4, 5, 6}, {0, 2, 3, 0, 0, 5, 0});
  CHECK(detect_peaks(dip, 1.0) == std::vector<double>{2.0, 5.0});
  CHECK(detect_peaks(dip, 1.0, 4.0) == std::vector<double>{5.0});
  // Ties inside an excursion keep the earliest sample.
  const SusceptibilityTrace plateau({0, 1, 2, 3}, {0, 4, 4, 0});
  CHECK(detect_peaks(plateau, 1.0) == std::vector<double>{1.0});
}

TEST_CASE("noiseless single character") {
  const auto bits = encode_text("A");
  const auto trace =
      synthesize_trace(bits, table1_parameters(), ShapeParameter(1.1), {});
  const auto msg = decode_trace(trace, half_peak_config(bits, 1.1));
  CHECK(msg.text == "A");
  CHECK(msg.bits == bits);
  REQUIRE(msg.per_bit_margins.size() == 8);
  for (double m : msg.per_bit_margins) CHECK(m != 0.0);
  REQUIRE(msg.sync_times.size() == 1);
}

TEST_CASE("decoding is invariant under joint rescaling") {
  const auto bits = encode_text("QZX");
  NoiseModel noise{0.0, 0.0, 1};
  const auto p = table1_parameters();
  noise.additive_sigma =
      min_pulse_peak(bits, p, ShapeParameter(1.1), noise) / 15.0;
  const auto trace = synthesize_trace(bits, p, ShapeParameter(1.1), noise);
  const auto cfg = half_peak_config(bits, 1.1);
  const auto base = decode_trace(trace, cfg);
  for (double s : {1e-3, 0.5, 7.0, 1e4}) {
    auto scaled_cfg = cfg;
    scaled_cfg.threshold *= s;
    const auto scaled = decode_trace(trace.scaled(s), scaled_cfg);
    CHECK(scaled.bits == base.bits);
  }
}

TEST_CASE("end-to-end noiseless round trip for beta in [0, 5]") {
  std::mt19937_64 gen(11);
  const auto p = table1_parameters();
  for (double beta : {0.0, 0.5, 1.1, 2.0, 5.0}) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto m = random_message(gen, 6);
      const auto bits = encode_text(m);
      const auto trace = synthesize_trace(bits, p, ShapeParameter(beta), {});
      for (auto policy : {SyncPolicy::kFirstPeak, SyncPolicy::kFoldedPrefix}) {
        auto cfg = half_peak_config(bits, beta);
        cfg.sync_policy = policy;
        CAPTURE(beta);
        CAPTURE(m);
        CHECK(decode_trace(trace, cfg).text == m);
      }
    }
  }
}

TEST_CASE("sync times step by 8T") {
  const auto bits = encode_text("HELLO");
  const auto trace =
      synthesize_trace(bits, table1_parameters(), ShapeParameter(1.4), {});
  const auto msg = decode_trace(trace, half_peak_config(bits, 1.4));
  REQUIRE(msg.sync_times.size() == 5);
  for (std::size_t j = 1; j < msg.sync_times.size(); ++j) {
    CHECK(msg.sync_times[j] - msg.sync_times[j - 1] == doctest::Approx(32.0));
  }
}

TEST_CASE("threshold equality decodes as zero") {
  // A flat plateau exactly at threshold at a data-bit sampling instant.
  std::vector<double> t, v;
  for (int i = 0; i <= 400; ++i) {
    const double time = 0.1 * i;
    t.push_back(time);
    double value = 0.0;
    if (std::abs(time - 5.0) < 0.05) value = 2.0;          // prefix peak
    if (std::abs(time - 13.0) < 0.5) value = 1.0;          // bit 3 at threshold
    if (std::abs(time - 17.0) < 0.5) value = 1.5;          // bit 4 above
    v.push_back(value);
  }
  DetectionConfig cfg;
  cfg.threshold = 1.0;
  cfg.symbol_duration = 4.0;
  cfg.sync_policy = SyncPolicy::kFirstPeak;
  const auto msg = decode_trace(SusceptibilityTrace(t, v), cfg);
  CHECK(msg.bits.to_string() == "01001000");
  CHECK(msg.per_bit_margins[3] == 0.0);
}

TEST_CASE("decode errors") {
  const auto p = table1_parameters();
  const auto zero = synthesize_trace(BitSequence{0, 0, 0}, p, ShapeParameter(1.1), {});
  DetectionConfig cfg;
  cfg.threshold = 1e-6;
  CHECK(error_code_of([&] { decode_trace(zero, cfg); }) ==
        ErrorCode::kNoSynchronization);

  const auto bits = encode_text("AB");
  const auto full = synthesize_trace(bits, p, ShapeParameter(1.1), {});
  // Keep the second prefix peak but drop its data bits.
  const auto cut = full.window(0.0, 8.0 * 4.0 + 4.0 + 2.0);
  try {
    decode_trace(cut, half_peak_config(bits, 1.1));
    FAIL("expected partial character");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPartialCharacter);
    CHECK(std::string(e.what()).find("1 complete characters") !=
          std::string::npos);
  }
}

TEST_CASE("intersymbol interference one symbol after the peak") {
  const auto p = table1_parameters();
  for (double beta : {1.0, 1.1, 1.4, 2.0, 5.0}) {
    const auto r = SystemResponse::from_parameters(ShapeParameter(beta), p);
    const auto pk = peak(r);
    CAPTURE(beta);
    CHECK(system_response(pk.time + p.symbol_duration, r) < 0.05 * pk.value);
  }
  const auto low = SystemResponse::from_parameters(ShapeParameter(0.17), p);
  const double ratio =
      system_response(low.peak_time() + p.symbol_duration, low) / peak(low).value;
  MESSAGE("beta = 0.17: response T after the peak is " << ratio
                                                        << " of the peak");
}
