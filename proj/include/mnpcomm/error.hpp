#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mnpcomm {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidParameter,
  kParse,
  kNoSynchronization,
  kPartialCharacter,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; `code()` lets the CLI emit a
// stable machine-readable tag.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mnpcomm
