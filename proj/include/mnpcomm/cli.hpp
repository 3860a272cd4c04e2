#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mnpcomm {

inline constexpr const char* kToolVersion = "0.1.0";

/// Key-value record written next to every output so a run can be repeated.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> arguments;
  std::map<std::string, std::string> parameters;  // SI, post conversion
  std::map<std::string, std::string> seeds;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::string tool_version = kToolVersion;

  std::string to_string() const;
};

/// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::filesystem::path& path);
std::string bytes_digest(const std::string& bytes);

/// Runs one subcommand. `args` excludes the program name. Output goes to
/// `out` unless the subcommand names an output file; errors are one line on
/// `err` of the form `error: <code>: <message>`.
int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err);

}  // namespace mnpcomm
