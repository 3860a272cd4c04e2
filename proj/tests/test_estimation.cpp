#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mnpcomm/error.hpp"
#include "mnpcomm/estimation.hpp"
#include "mnpcomm/modem.hpp"

using namespace mnpcomm;

namespace {

SusceptibilityTrace pulse(double beta, const NoiseModel& noise = {},
                          double rate = 50.0) {
  return synthesize_trace(BitSequence{1}, table1_parameters(),
                          ShapeParameter(beta), noise, {rate});
}

double sum_of_squares(const SusceptibilityTrace& trace) {
  double s = 0.0;
  for (double v : trace.values()) s += v * v;
  return s;
}

}  // namespace

TEST_CASE("peak alignment") {
  const auto p = table1_parameters();
  const auto resp = SystemResponse::from_parameters(ShapeParameter(1.1), p);
  const double h = 0.01;
  std::vector<double> t, v;
  for (int k = -50; k <= 300; ++k) {
    t.push_back(resp.peak_time() + h * k);
    v.push_back(susceptibility(t.back(), resp, p));
  }
  const SusceptibilityTrace on_grid(t, v);
  CHECK(align_by_peak(on_grid, resp) == 0.0);
  CHECK(align_by_peak(on_grid.shifted(-0.3), resp) ==
        doctest::Approx(0.3).epsilon(1e-12));

  // Synthesised at 50 Hz: the grid misses the true peak by < one sample.
  const auto sampled = pulse(1.1).shifted(1.234);
  const double true_offset = -1.234;
  CHECK(std::abs(align_by_peak(sampled, resp) - true_offset) <= 0.02);

  const SusceptibilityTrace flat({0, 1, 2}, {1e-5, 1e-5, 1e-5});
  CHECK_THROWS_AS(align_by_peak(flat, resp), Error);
}

TEST_CASE("noiseless fits recover beta") {
  const auto p = table1_parameters();
  for (double beta : {0.17, 1.0, 1.1, 1.4}) {
    const auto trace = pulse(beta);
    const auto fit = fit_beta(trace, p);
    CAPTURE(beta);
    CHECK(std::abs(fit.beta_hat - beta) <= 1e-3);
    CHECK(fit.converged);
    CHECK(fit.amplitude_scale == 1.0);
    const auto window = fit_window(trace, p, {});
    CHECK(fit.residual_sse <= 1e-18 * sum_of_squares(window));
  }
}

TEST_CASE("fitted objective beats every coarse grid point") {
  const auto p = table1_parameters();
  NoiseModel noise{0.0, 0.0, 42};
  const auto clean = pulse(1.1);
  noise.additive_sigma = 0.05 * clean.values()[clean.argmax()];
  const auto trace = pulse(1.1, noise);
  FitOptions opts;
  const auto fit = fit_beta(trace, p, opts);
  const auto window = fit_window(trace, p, opts);
  const auto resp0 = SystemResponse::from_parameters(ShapeParameter(0.0), p);
  const double shift = align_by_peak(window, resp0);
  for (int i = 0; i < 200; ++i) {
    const double beta = opts.beta_max * i / 199.0;
    CHECK(fit.residual_sse <=
          residual_sse(window, p, ShapeParameter(beta), shift));
  }
}

TEST_CASE("fit is invariant to shifting the trace in time") {
  const auto p = table1_parameters();
  for (double beta : {0.17, 1.1}) {
    const auto trace = pulse(beta);
    const auto base = fit_beta(trace, p);
    for (double s : {0.3, -0.25, 17.0}) {
      const auto moved = fit_beta(trace.shifted(s), p);
      CAPTURE(beta);
      CAPTURE(s);
      CHECK(std::abs(moved.beta_hat - base.beta_hat) <= 1e-9);
      CHECK(moved.time_shift == doctest::Approx(base.time_shift - s));
    }
  }
}

TEST_CASE("free amplitude recovers scale and shape") {
  const auto p = table1_parameters();
  const auto trace = pulse(1.1).scaled(2.0);
  FitOptions opts;
  opts.free_amplitude = true;
  const auto fit = fit_beta(trace, p, opts);
  CHECK(std::abs(fit.amplitude_scale - 2.0) <= 1e-3);
  CHECK(std::abs(fit.beta_hat - 1.1) <= 1e-3);

  const auto fixed = fit_beta(trace, p);
  CHECK(std::abs(fixed.beta_hat - 1.1) > 1e-3);
}

TEST_CASE("noisy fits stay close on average") {
  const auto p = table1_parameters();
  const auto clean = pulse(1.1);
  const double peak_value = clean.values()[clean.argmax()];
  double total = 0.0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    NoiseModel noise{peak_value / 20.0, 0.0, static_cast<std::uint64_t>(100 + s)};
    total += std::abs(fit_beta(pulse(1.1, noise), p).beta_hat - 1.1);
  }
  CHECK(total / seeds <= 0.1);
}

TEST_CASE("explicit window and threshold") {
  const auto p = table1_parameters();
  const auto trace = synthesize_trace(BitSequence{1, 0, 0, 1}, p,
                                      ShapeParameter(1.4), {});
  FitOptions opts;
  opts.window = std::pair{0.0, 8.0};
  const auto fit = fit_beta(trace, p, opts);
  CHECK(std::abs(fit.beta_hat - 1.4) <= 1e-3);
  CHECK(fit.window_end <= 8.0);

  opts.window = std::pair{200.0, 300.0};
  CHECK_THROWS_AS(fit_beta(trace, p, opts), Error);
  opts.window = std::pair{30.0, 32.0};  // tail only, nothing above 1e-3
  opts.threshold = 1e-3;
  CHECK_THROWS_AS(fit_beta(trace, p, opts), Error);
}

TEST_CASE("non-finite samples are rejected") {
  const auto trace = pulse(1.1);
  std::vector<double> v(trace.values().begin(), trace.values().end());
  v[3] = std::numeric_limits<double>::quiet_NaN();
  const SusceptibilityTrace bad(
      std::vector<double>(trace.times().begin(), trace.times().end()), v);
  CHECK_THROWS_AS(fit_beta(bad, table1_parameters()), Error);
}

TEST_CASE("averaging aligned pulses") {
  const auto p = table1_parameters();
  const auto train = synthesize_trace(BitSequence{1, 0, 0, 1, 0, 0, 1, 0, 0, 1},
                                      p, ShapeParameter(1.1), {});
  const auto resp = SystemResponse::from_parameters(ShapeParameter(1.1), p);
  const double level = 0.5 * susceptibility(resp.peak_time(), resp, p);
  const auto avg = average_pulses(train, level, 4, 0.5 * p.symbol_duration);
  CHECK(avg.metadata().at("averaged_pulses") == "4");
  // Noiseless identical pulses: the average matches the first one up to
  // the small tails of earlier pulses.
  const auto fit = fit_beta(avg, p);
  CHECK(std::abs(fit.beta_hat - 1.1) < 0.05);
  CHECK_THROWS_AS(average_pulses(train, level, 5, 2.0), Error);

  // Averaging cancels independent noise.
  NoiseModel noise{level / 5.0, 0.0, 9};
  const auto noisy = synthesize_trace(BitSequence{1, 0, 0, 1, 0, 0, 1, 0, 0, 1},
                                      p, ShapeParameter(1.1), noise);
  const auto noisy_avg = average_pulses(noisy, level, 4, 2.0);
  CHECK(noisy_avg.size() > 100);
}
