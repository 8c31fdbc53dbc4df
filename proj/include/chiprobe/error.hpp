#pragma once

#include <stdexcept>
#include <string>

namespace chiprobe {

enum class ErrorCode {
  kInvalidArgument,
  kOutOfRange,
  kNonConvergence,
  kTruncation,
  kNullOutcome,
  kConfig,
  kIo,
  kComputation,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the C
// API maps them onto cp_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace chiprobe
