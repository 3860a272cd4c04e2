#include "mnpcomm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "mnpcomm/error.hpp"
#include "mnpcomm/hydrodynamics.hpp"

namespace mnpcomm {
namespace {

// The window fraction does not depend on the tube radius, so particles are
// tracked in a tube of unit radius.
constexpr double kUnitRadius = 1.0;

unsigned worker_count(const OracleConfig& cfg) {
  unsigned n = cfg.threads != 0 ? cfg.threads
                                : std::max(1u, std::thread::hardware_concurrency());
  const auto per_worker = std::int64_t{50'000};
  const auto useful = static_cast<unsigned>(
      std::max<std::int64_t>(1, cfg.particle_count / per_worker));
  return std::min(n, useful);
}

// Counts particles in [d, d + c_z] at each time for particle indices
// [begin, end).
void count_range(const SystemResponse& resp, const OracleConfig& cfg,
                 std::int64_t begin, std::int64_t end,
                 std::vector<std::int64_t>& counts) {
  const InitialDistribution dist(ShapeParameter(resp.beta()), kUnitRadius);
  const FlowField field(resp.center_velocity(), kUnitRadius);
  const CounterRng rng(cfg.rng_seed);
  const double near = resp.distance();
  const double far = resp.distance() + resp.receiver_length();
  for (std::int64_t i = begin; i < end; ++i) {
    const double r = sample_radius(dist, rng, static_cast<std::uint64_t>(i));
    const double v = velocity_at(r, field);
    for (std::size_t k = 0; k < cfg.time_points.size(); ++k) {
      const double z = v * cfg.time_points[k];
      if (z >= near && z <= far) ++counts[k];
    }
  }
}

}  // namespace

void validate_oracle_config(const OracleConfig& cfg) {
  if (cfg.particle_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "particle_count must be >= 1");
  }
  for (double t : cfg.time_points) {
    if (!std::isfinite(t) || t < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "time points must be finite and non-negative");
    }
  }
}

double sample_radius(const InitialDistribution& dist, double u) {
  const double inner = std::pow(1.0 - u, 1.0 / (dist.beta() + 1.0));
  return dist.tube_radius() * std::sqrt(std::max(0.0, 1.0 - inner));
}

double sample_radius(const InitialDistribution& dist, const CounterRng& rng,
                     std::uint64_t counter) {
  return sample_radius(dist, rng.uniform(counter));
}

std::vector<double> fractions_in_window(const SystemResponse& resp,
                                        const OracleConfig& cfg) {
  validate_oracle_config(cfg);
  const std::size_t nt = cfg.time_points.size();
  const unsigned workers = worker_count(cfg);
  std::vector<std::vector<std::int64_t>> partial(
      workers, std::vector<std::int64_t>(nt, 0));

  const std::int64_t n = cfg.particle_count;
  auto bounds = [&](unsigned w) {
    return std::pair{n * w / workers, n * (w + 1) / workers};
  };
  if (workers == 1) {
    count_range(resp, cfg, 0, n, partial[0]);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const auto [begin, end] = bounds(w);
        count_range(resp, cfg, begin, end, partial[w]);
      });
    }
  }

  std::vector<double> fractions(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    std::int64_t total = 0;
    for (const auto& counts : partial) total += counts[k];
    fractions[k] = static_cast<double>(total) / static_cast<double>(n);
  }
  return fractions;
}

double fraction_in_window(double t, const SystemResponse& resp,
                          const OracleConfig& cfg) {
  OracleConfig single = cfg;
  single.time_points = {t};
  return fractions_in_window(resp, single).front();
}

bool OracleReport::all_pass() const {
  return std::all_of(points.begin(), points.end(),
                     [](const OraclePoint& p) { return p.pass; });
}

OracleReport run_oracle(const SystemResponse& resp, const OracleConfig& cfg) {
  const auto mc = fractions_in_window(resp, cfg);
  const auto n = static_cast<double>(cfg.particle_count);
  OracleReport report{std::string(CounterRng::kAlgorithm), {}};
  report.points.reserve(mc.size());
  for (std::size_t k = 0; k < mc.size(); ++k) {
    const double t = cfg.time_points[k];
    const double p = system_response(t, resp);
    const double tol = 3.0 * std::sqrt(p * (1.0 - p) / n) + 1e-12;
    const double err = std::abs(mc[k] - p);
    report.points.push_back({t, p, mc[k], err, tol, err <= tol});
  }
  return report;
}

std::vector<double> default_oracle_times(const SystemResponse& resp,
                                         int count) {
  if (count < 3) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 3 time points");
  }
  const double t_in = resp.arrival_time();
  const double t_peak = resp.peak_time();
  const int before = std::max(1, count / 5);
  const int rising = std::max(1, (count * 3) / 10);
  const int falling = count - before - rising;

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < before; ++i) {
    times.push_back(t_in * static_cast<double>(i) / before);
  }
  for (int i = 1; i <= rising; ++i) {
    times.push_back(t_in + (t_peak - t_in) * static_cast<double>(i) /
                               (rising + 1));
  }
  // Geometric spacing from 1.02 t_peak to 20 t_peak.
  const double lo = 1.02 * t_peak;
  const double hi = 20.0 * t_peak;
  for (int i = 0; i < falling; ++i) {
    const double w = falling == 1 ? 0.0 : static_cast<double>(i) / (falling - 1);
    times.push_back(lo * std::pow(hi / lo, w));
  }
  return times;
}

}  // namespace mnpcomm
