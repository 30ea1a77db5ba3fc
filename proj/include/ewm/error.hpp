#pragma once

#include <stdexcept>
#include <string>

namespace ewm {

enum class ErrorCode {
  ok = 0,
  invalid_argument = 1,
  domain = 2,
  not_converged = 3,
  evolution_aborted = 4,
  io = 5,
  config = 6,
};

const char* to_string(ErrorCode code);

/// Base exception for the library; the C API maps `code()` onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace ewm
