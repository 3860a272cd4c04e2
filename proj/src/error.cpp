#include "mnpcomm/error.hpp"

namespace mnpcomm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInvalidParameter: return "invalid_parameter";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kNoSynchronization: return "no_synchronization";
    case ErrorCode::kPartialCharacter: return "partial_character";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace mnpcomm
