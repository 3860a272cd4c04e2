#include "mnpcomm/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "mnpcomm/channel.hpp"
#include "mnpcomm/error.hpp"
#include "mnpcomm/estimation.hpp"
#include "mnpcomm/hydrodynamics.hpp"
#include "mnpcomm/io.hpp"
#include "mnpcomm/modem.hpp"
#include "mnpcomm/oracle.hpp"
#include "mnpcomm/random.hpp"

namespace mnpcomm {
namespace {

std::string slurp(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Destination for a subcommand's primary output: a named file or the
// caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error(ErrorCode::kIo, "cannot write " + path);
      stream_ = file_.get();
    }
  }

  std::ostream& stream() { return *stream_; }
  bool is_file() const { return file_ != nullptr; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

// Reads a named file or, for "-", the caller's input stream, recording the
// digest of the bytes actually consumed.
std::string read_input(const std::string& path, std::istream& in,
                       RunManifest& manifest) {
  std::string bytes;
  if (path == "-") {
    bytes = slurp(in);
  } else {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::kIo, "cannot open " + path);
    bytes = slurp(file);
  }
  manifest.input_digests[path] = bytes_digest(bytes);
  return bytes;
}

void record_parameters(const SystemParameters& p, RunManifest& manifest) {
  auto& m = manifest.parameters;
  m["tube_radius_m"] = format_double(p.tube_radius);
  m["injection_tube_radius_m"] = format_double(p.injection_tube_radius);
  m["receiver_radius_m"] = format_double(p.receiver_radius);
  m["receiver_length_m"] = format_double(p.receiver_length);
  m["propagation_distance_m"] = format_double(p.propagation_distance);
  m["background_flow_rate_m3_per_s"] = format_double(p.background_flow_rate);
  m["injection_flow_rate_m3_per_s"] = format_double(p.injection_flow_rate);
  m["injection_volume_m3"] = format_double(p.injection_volume);
  m["symbol_duration_s"] = format_double(p.symbol_duration);
  m["reference_susceptibility"] = format_double(p.reference_susceptibility);
  m["kinematic_viscosity_m2_per_s"] = format_double(p.kinematic_viscosity);
  m["diffusion_coefficient_m2_per_s"] = format_double(p.diffusion_coefficient);
  m["baseline_susceptibility"] = format_double(p.baseline_susceptibility);
}

SystemParameters load_parameters(const std::string& path, std::istream& in,
                                 RunManifest& manifest) {
  const auto p = parse_parameters(read_input(path, in, manifest));
  record_parameters(p, manifest);
  return p;
}

void emit_manifest(const RunManifest& manifest, const Sink& sink,
                   const std::string& manifest_path, std::ostream& err) {
  std::string target = manifest_path;
  if (target.empty() && sink.is_file()) target = sink.path() + ".manifest";
  if (target.empty()) {
    err << manifest.to_string();
    return;
  }
  std::ofstream file(target, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + target);
  file << manifest.to_string();
}

BitSequence payload_bits(const std::string& text, const std::string& bits) {
  if (!text.empty() && !bits.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "--text and --bits are mutually exclusive");
  }
  if (text.empty() && bits.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "one of --text or --bits is required");
  }
  return text.empty() ? BitSequence::parse(bits) : encode_text(text);
}

struct CommonOptions {
  std::string params;
  std::string output;
  std::string manifest;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_params) {
  auto* p = cmd->add_option("--params", opt.params,
                            "parameter file (key = value, unit suffixes)");
  if (needs_params) p->required();
  cmd->add_option("-o,--output", opt.output, "output file (default: stdout)");
  cmd->add_option("--manifest", opt.manifest,
                  "manifest path (default: <output>.manifest or stderr)");
}

}  // namespace

std::string RunManifest::to_string() const {
  std::ostringstream out;
  out << "subcommand = " << subcommand << '\n';
  out << "tool_version = " << tool_version << '\n';
  out << "arguments =";
  for (const auto& a : arguments) out << ' ' << std::quoted(a);
  out << '\n';
  for (const auto& [k, v] : seeds) out << "seed." << k << " = " << v << '\n';
  for (const auto& [k, v] : parameters) {
    out << "param." << k << " = " << v << '\n';
  }
  for (const auto& [k, v] : input_digests) {
    out << "input_sha256." << k << " = " << v << '\n';
  }
  return out.str();
}

std::string bytes_digest(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(md[i]);
  }
  return hex.str();
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return bytes_digest(slurp(in));
}

int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  CLI::App app{"Magnetic-nanoparticle duct-flow link: channel model, Monte "
               "Carlo oracle, OOK modem and shape fitting",
               "mnpcomm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonOptions common;
  RunManifest manifest;
  manifest.arguments = args;

  // analyze
  auto* analyze = app.add_subcommand("analyze", "dimensionless numbers");
  add_common(analyze, common, true);

  // response
  double beta = 0.0;
  double t_start = 0.0;
  std::optional<double> t_end;
  double dt = 0.02;
  double amplitude_scale = 1.0;
  auto* response = app.add_subcommand("response", "closed-form chi(t) as CSV");
  add_common(response, common, true);
  response->add_option("--beta", beta, "shape parameter")->required();
  response->add_option("--t-start", t_start, "first time [s]");
  response->add_option("--t-end", t_end, "last time [s] (default 10 t_peak)");
  response->add_option("--dt", dt, "time step [s]")->check(CLI::PositiveNumber);
  response->add_option("--amplitude-scale", amplitude_scale);

  // oracle
  std::int64_t particles = 1'000'000;
  std::optional<std::uint64_t> seed;
  int points = 20;
  std::vector<double> times;
  unsigned threads = 0;
  auto* oracle = app.add_subcommand("oracle", "Monte Carlo check of P(t)");
  add_common(oracle, common, true);
  oracle->add_option("--beta", beta)->required();
  oracle->add_option("--particles", particles)->check(CLI::PositiveNumber);
  oracle->add_option("--seed", seed, "RNG seed")->required();
  oracle->add_option("--points", points, "number of default time points");
  oracle->add_option("--times", times, "explicit time points [s]")
      ->delimiter(',');
  oracle->add_option("--threads", threads);

  // transmit
  std::string text;
  std::string bits;
  std::optional<double> symbol_duration;
  auto* transmit = app.add_subcommand("transmit", "text -> injection schedule");
  add_common(transmit, common, false);
  transmit->add_option("--text", text);
  transmit->add_option("--bits", bits);
  transmit->add_option("--symbol-duration", symbol_duration, "T [s]");

  // synthesize
  double noise_sigma = 0.0;
  std::optional<double> noise_rel;
  double jitter = 0.0;
  double sample_rate = 50.0;
  bool water_offset = false;
  auto* synth = app.add_subcommand("synthesize", "text/bits -> trace CSV");
  add_common(synth, common, true);
  synth->add_option("--text", text);
  synth->add_option("--bits", bits);
  synth->add_option("--beta", beta)->required();
  synth->add_option("--seed", seed)->required();
  synth->add_option("--noise-sigma", noise_sigma, "additive noise std-dev");
  synth->add_option("--noise-rel", noise_rel,
                    "additive noise std-dev relative to the smallest peak");
  synth->add_option("--jitter-sigma", jitter, "relative pulse gain std-dev");
  synth->add_option("--sample-rate", sample_rate, "Hz")
      ->check(CLI::PositiveNumber);
  synth->add_option("--amplitude-scale", amplitude_scale);
  synth->add_flag("--water-offset", water_offset,
                  "add the water baseline susceptibility");

  // decode
  std::string trace_path;
  double threshold = 0.0;
  std::string sync = "folded";
  std::string margins_path;
  auto* decode = app.add_subcommand("decode", "trace CSV -> text and bits");
  add_common(decode, common, false);
  decode->add_option("--trace", trace_path, "trace CSV or - for stdin")
      ->required();
  decode->add_option("--threshold", threshold)->required();
  decode->add_option("--symbol-duration", symbol_duration, "T [s]");
  decode->add_option("--sync", sync, "first-peak or folded")
      ->check(CLI::IsMember({"first-peak", "folded"}));
  decode->add_option("--margins", margins_path, "per-bit margins CSV");

  // fit
  bool free_amplitude = false;
  std::vector<double> window;
  std::size_t average = 0;
  double beta_max = 50.0;
  std::optional<double> fit_threshold;
  std::string fit_csv;
  auto* fit = app.add_subcommand("fit", "least-squares fit of beta");
  add_common(fit, common, true);
  fit->add_option("--trace", trace_path, "trace CSV or - for stdin")
      ->required();
  fit->add_flag("--free-amplitude", free_amplitude);
  fit->add_option("--window", window, "t0 t1 [s]")->expected(2);
  fit->add_option("--average-pulses", average, "average k aligned pulses");
  fit->add_option("--threshold", fit_threshold,
                  "pulse level (default half the maximum)");
  fit->add_option("--beta-max", beta_max)->check(CLI::PositiveNumber);
  fit->add_option("--fit-csv", fit_csv, "write t,measured,fitted,residual");

  std::vector<const char*> argv{"mnpcomm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& c : msg) {
      if (c == '\n') c = ' ';
    }
    err << "error: usage: " << msg << '\n';
    return 2;
  }

  try {
    if (analyze->parsed()) {
      manifest.subcommand = "analyze";
      const auto p = load_parameters(common.params, in, manifest);
      const auto re = reynolds_number(p);
      const auto pe = peclet_number(p);
      Sink sink(common.output, out);
      auto& os = sink.stream();
      os << "v_eff_mm_per_s = " << format_double(effective_velocity(p) * 1e3)
         << '\n'
         << "v0_mm_per_s = " << format_double(center_velocity(p) * 1e3) << '\n'
         << "reynolds = " << format_double(re.value) << '\n'
         << "peclet = " << format_double(pe.value) << '\n'
         << "d_over_a = " << format_double(pe.length_ratio) << '\n'
         << "classification = " << (re.laminar ? "laminar" : "turbulent")
         << ", " << (pe.flow_dominated ? "flow-dominated" : "diffusion-dominated")
         << '\n';
      if (!re.laminar) {
        err << "warning: Reynolds number " << format_double(re.value)
            << " exceeds the laminar limit " << kLaminarReynoldsLimit
            << "; the laminar model may not apply\n";
      }
      emit_manifest(manifest, sink, common.manifest, err);
      return 0;
    }

    if (response->parsed()) {
      manifest.subcommand = "response";
      const auto p = load_parameters(common.params, in, manifest);
      const auto resp = SystemResponse::from_parameters(ShapeParameter(beta), p);
      const double last = t_end.value_or(10.0 * resp.peak_time());
      if (!(last >= t_start) || t_start < 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "need 0 <= t-start <= t-end");
      }
      const auto n = static_cast<std::size_t>(
          std::floor((last - t_start) / dt + 1e-9)) + 1;
      std::vector<double> ts(n);
      std::vector<double> vs(n);
      for (std::size_t i = 0; i < n; ++i) {
        ts[i] = t_start + dt * static_cast<double>(i);
        vs[i] = susceptibility(ts[i], resp, p, amplitude_scale);
      }
      Sink sink(common.output, out);
      write_trace(SusceptibilityTrace(std::move(ts), std::move(vs)),
                  sink.stream());
      emit_manifest(manifest, sink, common.manifest, err);
      return 0;
    }

    if (oracle->parsed()) {
      manifest.subcommand = "oracle";
      manifest.seeds["oracle"] = std::to_string(*seed);
      manifest.seeds["rng_algorithm"] = std::string(CounterRng::kAlgorithm);
      const auto p = load_parameters(common.params, in, manifest);
      const auto resp = SystemResponse::from_parameters(ShapeParameter(beta), p);
      OracleConfig cfg;
      cfg.particle_count = particles;
      cfg.rng_seed = *seed;
      cfg.threads = threads;
      cfg.time_points = times.empty() ? default_oracle_times(resp, points) : times;
      const auto report = run_oracle(resp, cfg);
      Sink sink(common.output, out);
      auto& os = sink.stream();
      os << "time_s,analytic,monte_carlo,abs_err,tolerance\n";
      std::size_t passed = 0;
      for (const auto& pt : report.points) {
        os << format_double(pt.time) << ',' << format_double(pt.analytic) << ','
           << format_double(pt.monte_carlo) << ',' << format_double(pt.abs_err)
           << ',' << format_double(pt.tolerance) << '\n';
        passed += pt.pass ? 1 : 0;
      }
      os << "# result = " << (report.all_pass() ? "pass" : "fail") << " ("
         << passed << '/' << report.points.size() << " within tolerance, "
         << report.rng_algorithm << ")\n";
      emit_manifest(manifest, sink, common.manifest, err);
      if (!report.all_pass()) {
        err << "error: oracle_mismatch: "
            << report.points.size() - passed << " points outside tolerance\n";
        return 1;
      }
      return 0;
    }

    if (transmit->parsed()) {
      manifest.subcommand = "transmit";
      double T = 0.0;
      if (!common.params.empty()) {
        T = load_parameters(common.params, in, manifest).symbol_duration;
      }
      if (symbol_duration) T = *symbol_duration;
      if (!(T > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "need --symbol-duration or --params");
      }
      const auto payload = payload_bits(text, bits);
      Sink sink(common.output, out);
      auto& os = sink.stream();
      os << "symbol_index,bit,injection_time_s\n";
      for (const auto& inj : injection_schedule(payload, T)) {
        os << inj.symbol_index << ',' << static_cast<int>(inj.bit) << ','
           << format_double(inj.time) << '\n';
      }
      emit_manifest(manifest, sink, common.manifest, err);
      return 0;
    }

    if (synth->parsed()) {
      manifest.subcommand = "synthesize";
      manifest.seeds["noise"] = std::to_string(*seed);
      manifest.seeds["rng_algorithm"] = std::string(CounterRng::kAlgorithm);
      if (noise_rel && noise_sigma != 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "--noise-sigma and --noise-rel are mutually exclusive");
      }
      const auto p = load_parameters(common.params, in, manifest);
      const auto payload = payload_bits(text, bits);
      const ShapeParameter b(beta);
      NoiseModel noise{noise_sigma, jitter, *seed};
      if (noise_rel) {
        noise.additive_sigma =
            *noise_rel * min_pulse_peak(payload, p, b, noise, amplitude_scale);
      }
      SynthesisOptions opts{sample_rate, amplitude_scale, water_offset};
      const auto trace = synthesize_trace(payload, p, b, noise, opts);
      Sink sink(common.output, out);
      write_trace(trace, sink.stream());
      emit_manifest(manifest, sink, common.manifest, err);
      return 0;
    }

    if (decode->parsed()) {
      manifest.subcommand = "decode";
      DetectionConfig cfg;
      cfg.threshold = threshold;
      if (!common.params.empty()) {
        cfg.symbol_duration =
            load_parameters(common.params, in, manifest).symbol_duration;
      }
      if (symbol_duration) cfg.symbol_duration = *symbol_duration;
      cfg.sync_policy =
          sync == "first-peak" ? SyncPolicy::kFirstPeak : SyncPolicy::kFoldedPrefix;
      std::istringstream trace_in(read_input(trace_path, in, manifest));
      const auto trace = read_trace(trace_in);
      const auto msg = decode_trace(trace, cfg);

      Sink sink(common.output, out);
      auto& os = sink.stream();
      os << "text = " << msg.text << '\n'
         << "bits = " << msg.bits.to_string() << '\n'
         << "sync_times_s =";
      for (double s : msg.sync_times) os << ' ' << format_double(s);
      os << '\n';
      if (!margins_path.empty()) {
        std::ofstream mf(margins_path, std::ios::binary);
        if (!mf) throw Error(ErrorCode::kIo, "cannot write " + margins_path);
        mf << "char_index,bit_index,bit,sample_time_s,margin\n";
        for (std::size_t i = 0; i < msg.bits.size(); ++i) {
          const std::size_t j = i / kBitsPerChar;
          const std::size_t k = i % kBitsPerChar;
          const double at = msg.sync_times[j] +
                            (static_cast<double>(k) - 1.0) * cfg.symbol_duration;
          mf << j << ',' << k << ',' << static_cast<int>(msg.bits[i]) << ','
             << format_double(at) << ',' << format_double(msg.per_bit_margins[i])
             << '\n';
        }
      }
      emit_manifest(manifest, sink, common.manifest, err);
      return 0;
    }

    if (fit->parsed()) {
      manifest.subcommand = "fit";
      const auto p = load_parameters(common.params, in, manifest);
      std::istringstream trace_in(read_input(trace_path, in, manifest));
      auto trace = read_trace(trace_in);
      FitOptions opts;
      opts.free_amplitude = free_amplitude;
      opts.beta_max = beta_max;
      opts.threshold = fit_threshold;
      if (!window.empty()) opts.window = std::pair{window[0], window[1]};
      if (average > 1) {
        const double level =
            fit_threshold.value_or(0.5 * trace.values()[trace.argmax()]);
        trace = average_pulses(trace, level, average, 0.5 * p.symbol_duration);
      }
      const auto result = fit_beta(trace, p, opts);

      Sink sink(common.output, out);
      auto& os = sink.stream();
      os << "beta_hat = " << format_double(result.beta_hat) << '\n'
         << "time_shift_s = " << format_double(result.time_shift) << '\n'
         << "amplitude_scale = " << format_double(result.amplitude_scale) << '\n'
         << "residual_sse = " << format_double(result.residual_sse) << '\n'
         << "iterations = " << result.iterations << '\n'
         << "converged = " << (result.converged ? "true" : "false") << '\n'
         << "window_s = " << format_double(result.window_start) << ' '
         << format_double(result.window_end) << '\n';
      if (!fit_csv.empty()) {
        std::ofstream cf(fit_csv, std::ios::binary);
        if (!cf) throw Error(ErrorCode::kIo, "cannot write " + fit_csv);
        const auto resp =
            SystemResponse::from_parameters(ShapeParameter(result.beta_hat), p);
        const auto scope = trace.window(result.window_start, result.window_end);
        cf << "time_s,measured,fitted,residual\n";
        for (std::size_t i = 0; i < scope.size(); ++i) {
          const double t = scope.times()[i];
          const double y = scope.values()[i];
          const double m = susceptibility(t + result.time_shift, resp, p,
                                          result.amplitude_scale);
          cf << format_double(t) << ',' << format_double(y) << ','
             << format_double(m) << ',' << format_double(m - y) << '\n';
        }
      }
      emit_manifest(manifest, sink, common.manifest, err);
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace mnpcomm
