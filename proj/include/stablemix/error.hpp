#pragma once

#include <stdexcept>
#include <string>

namespace stablemix {

enum class ErrorCode {
  invalid_argument,
  degenerate_law,   // request that has no meaning for alpha == 1 (S == 1)
  out_of_range,     // argument outside the representable evaluation range
  data,             // malformed or degenerate input data
  identifiability,
  non_convergence,
  capacity,         // numeric overflow that log-space storage could not absorb
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::invalid_argument, message);
}

}  // namespace stablemix
