#pragma once

#include <stdexcept>
#include <string>

namespace psgm {

// Mirrors psgm_status in the C header; values must stay in sync.
enum class ErrorCode {
  kInvalidArgument = 1,
  kHypothesis = 2,
  kNumeric = 3,
  kIo = 4,
  kParse = 5,
  kStationary = 6,
  kUnsupported = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what,
                    ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!condition) fail(code, what);
}

}  // namespace psgm
