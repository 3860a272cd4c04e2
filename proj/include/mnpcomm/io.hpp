#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "mnpcomm/parameters.hpp"
#include "mnpcomm/trace.hpp"

namespace mnpcomm {

// Parameter files hold one `key = value` per line; `#` starts a comment.
// Keys are a SystemParameters field name followed by a unit suffix, e.g.
// `tube_radius_mm` or `background_flow_rate_ml_per_min`. Dimensionless
// fields take no suffix.

SystemParameters parse_parameters(std::string_view text);
SystemParameters parse_parameter_file(const std::filesystem::path& path);

/// Writes every field in laboratory units; parse_parameters reads it back.
std::string format_parameters(const SystemParameters& p);

/// Shortest representation that round-trips to the same double.
std::string format_double(double value);

// Trace CSV: header `time_s,chi`, one sample per row, LF line endings.

SusceptibilityTrace read_trace(std::istream& in);
SusceptibilityTrace read_trace(const std::filesystem::path& path);
void write_trace(const SusceptibilityTrace& trace, std::ostream& out);
void write_trace(const SusceptibilityTrace& trace,
                 const std::filesystem::path& path);

}  // namespace mnpcomm
