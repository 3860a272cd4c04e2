#include "mnpcomm/bits.hpp"

#include <cctype>
#include <cmath>

#include "mnpcomm/error.hpp"

namespace mnpcomm {

BitSequence::BitSequence(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw Error(ErrorCode::kInvalidArgument, "bits must be 0 or 1");
  }
}

BitSequence::BitSequence(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) {
      throw Error(ErrorCode::kInvalidArgument, "bits must be 0 or 1");
    }
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
}

BitSequence BitSequence::parse(const std::string& text) {
  BitSequence out;
  for (char c : text) {
    if (c == '0' || c == '1') {
      out.push_back(c == '1');
    } else if (c != ',' && !std::isspace(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::kParse,
                  std::string("unexpected character '") + c + "' in bit string");
    }
  }
  return out;
}

std::string BitSequence::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

void validate_detection_config(const DetectionConfig& cfg) {
  if (!std::isfinite(cfg.threshold) || !(cfg.threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
  }
  if (!std::isfinite(cfg.symbol_duration) || !(cfg.symbol_duration > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "symbol_duration must be positive");
  }
}

}  // namespace mnpcomm
