#include "mnpcomm/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mnpcomm/error.hpp"
#include "mnpcomm/units.hpp"

namespace mnpcomm {
namespace {

struct UnitSuffix {
  std::string_view suffix;
  double factor;
};

constexpr std::array<UnitSuffix, 4> kLengthUnits{{{"m", units::kMeter},
                                                  {"cm", units::kCentimeter},
                                                  {"mm", units::kMillimeter},
                                                  {"um", units::kMicrometer}}};
constexpr std::array<UnitSuffix, 4> kFlowUnits{
    {{"m3_per_s", 1.0},
     {"ml_per_s", units::kMilliliter},
     {"ml_per_min", units::kMilliliterPerMinute},
     {"ul_per_min", units::kMicroliterPerMinute}}};
constexpr std::array<UnitSuffix, 3> kVolumeUnits{{{"m3", units::kCubicMeter},
                                                  {"ml", units::kMilliliter},
                                                  {"ul", units::kMicroliter}}};
constexpr std::array<UnitSuffix, 2> kTimeUnits{
    {{"s", units::kSecond}, {"ms", units::kMillisecond}}};
constexpr std::array<UnitSuffix, 1> kDiffusivityUnits{{{"m2_per_s", 1.0}}};

struct Field {
  std::string_view name;
  double SystemParameters::*member;
  std::span<const UnitSuffix> units;  // empty: dimensionless
  std::string_view lab_unit;          // used when writing
  bool required;
};

const std::array<Field, 13>& fields() {
  static const std::array<Field, 13> table{{
      {"tube_radius", &SystemParameters::tube_radius, kLengthUnits, "mm", true},
      {"injection_tube_radius", &SystemParameters::injection_tube_radius,
       kLengthUnits, "mm", true},
      {"receiver_radius", &SystemParameters::receiver_radius, kLengthUnits,
       "mm", true},
      {"receiver_length", &SystemParameters::receiver_length, kLengthUnits,
       "mm", true},
      {"propagation_distance", &SystemParameters::propagation_distance,
       kLengthUnits, "mm", true},
      {"background_flow_rate", &SystemParameters::background_flow_rate,
       kFlowUnits, "ml_per_min", true},
      {"injection_flow_rate", &SystemParameters::injection_flow_rate,
       kFlowUnits, "ml_per_min", true},
      {"injection_volume", &SystemParameters::injection_volume, kVolumeUnits,
       "ul", true},
      {"symbol_duration", &SystemParameters::symbol_duration, kTimeUnits, "s",
       true},
      {"reference_susceptibility", &SystemParameters::reference_susceptibility,
       {}, "", true},
      {"kinematic_viscosity", &SystemParameters::kinematic_viscosity,
       kDiffusivityUnits, "m2_per_s", false},
      {"diffusion_coefficient", &SystemParameters::diffusion_coefficient,
       kDiffusivityUnits, "m2_per_s", false},
      {"baseline_susceptibility", &SystemParameters::baseline_susceptibility,
       {}, "", false},
  }};
  return table;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return value;
}

std::string line_tag(std::size_t line) {
  return "line " + std::to_string(line) + ": ";
}

// Resolves `key` to a field and the factor converting its value to SI.
std::pair<const Field*, double> resolve_key(std::string_view key,
                                            std::size_t line) {
  const Field* match = nullptr;
  for (const auto& f : fields()) {
    const bool exact = key == f.name;
    const bool prefixed = key.size() > f.name.size() + 1 &&
                          key.substr(0, f.name.size()) == f.name &&
                          key[f.name.size()] == '_';
    if ((exact || prefixed) &&
        (match == nullptr || f.name.size() > match->name.size())) {
      match = &f;
    }
  }
  if (match == nullptr) {
    throw Error(ErrorCode::kParse,
                line_tag(line) + "unknown key '" + std::string(key) + "'");
  }
  if (match->units.empty()) {
    if (key != match->name) {
      throw Error(ErrorCode::kParse, line_tag(line) + "'" +
                                         std::string(match->name) +
                                         "' is dimensionless and takes no "
                                         "unit suffix");
    }
    return {match, 1.0};
  }
  if (key == match->name) {
    throw Error(ErrorCode::kParse, line_tag(line) + "key '" + std::string(key) +
                                       "' needs a unit suffix");
  }
  const auto suffix = key.substr(match->name.size() + 1);
  for (const auto& u : match->units) {
    if (u.suffix == suffix) return {match, u.factor};
  }
  throw Error(ErrorCode::kParse, line_tag(line) + "unknown unit suffix '" +
                                     std::string(suffix) + "' for '" +
                                     std::string(match->name) + "'");
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), ptr};
}

SystemParameters parse_parameters(std::string_view text) {
  SystemParameters p;
  std::map<std::string_view, bool> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse,
                  line_tag(line_no) + "expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto [field, factor] = resolve_key(key, line_no);
    if (seen.contains(field->name)) {
      throw Error(ErrorCode::kParse, line_tag(line_no) + "duplicate key for '" +
                                         std::string(field->name) + "'");
    }
    const auto value = parse_number(line.substr(eq + 1));
    if (!value) {
      throw Error(ErrorCode::kParse, line_tag(line_no) +
                                         "malformed number for key '" +
                                         std::string(key) + "'");
    }
    p.*(field->member) = units::to_si(*value, factor);
    seen[field->name] = true;
  }

  for (const auto& f : fields()) {
    if (f.required && !seen.contains(f.name)) {
      std::string example(f.name);
      if (!f.lab_unit.empty()) example += "_" + std::string(f.lab_unit);
      throw Error(ErrorCode::kParse, "missing required key '" +
                                         std::string(f.name) + "' (e.g. " +
                                         example + ")");
    }
  }
  return validate_parameters(p);
}

SystemParameters parse_parameter_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open parameter file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_parameters(buf.str());
}

std::string format_parameters(const SystemParameters& p) {
  std::string out;
  for (const auto& f : fields()) {
    double factor = 1.0;
    std::string key(f.name);
    if (!f.units.empty()) {
      for (const auto& u : f.units) {
        if (u.suffix == f.lab_unit) factor = u.factor;
      }
      key += "_" + std::string(f.lab_unit);
    }
    out += key + " = " + format_double(units::from_si(p.*(f.member), factor)) +
           "\n";
  }
  return out;
}

SusceptibilityTrace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "time_s,chi") {
    throw Error(ErrorCode::kParse, "trace: missing header 'time_s,chi'");
  }
  std::vector<double> times;
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto comma = body.find(',');
    const auto t = comma == std::string_view::npos
                       ? std::nullopt
                       : parse_number(body.substr(0, comma));
    const auto v = comma == std::string_view::npos
                       ? std::nullopt
                       : parse_number(body.substr(comma + 1));
    if (!t || !v) {
      throw Error(ErrorCode::kParse,
                  "trace row " + std::to_string(row) + ": non-numeric cell");
    }
    if (!times.empty() && !(*t > times.back())) {
      throw Error(ErrorCode::kParse, "trace row " + std::to_string(row) +
                                         ": time not strictly increasing");
    }
    times.push_back(*t);
    values.push_back(*v);
  }
  return {std::move(times), std::move(values)};
}

SusceptibilityTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open trace " + path.string());
  return read_trace(in);
}

void write_trace(const SusceptibilityTrace& trace, std::ostream& out) {
  out << "time_s,chi\n";
  const auto t = trace.times();
  const auto v = trace.values();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_double(t[i]) << ',' << format_double(v[i]) << '\n';
  }
}

void write_trace(const SusceptibilityTrace& trace,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write trace " + path.string());
  write_trace(trace, out);
}

}  // namespace mnpcomm
