#pragma once

#include <stdexcept>
#include <string>

namespace hodge {

enum class ErrorCode {
  invalid_argument = 1,
  factorization_failure = 2,
  no_convergence = 3,
  io_failure = 4,
  numerical_failure = 5,
};

// Single exception type for the library; the C API maps `code()` onto its
// status enum.
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

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::invalid_argument, what);
}

}  // namespace hodge
