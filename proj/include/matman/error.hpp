#pragma once

#include <stdexcept>
#include <string>

namespace matman {

enum class ErrorCode {
  invalid_input = 1,
  not_positive_definite,
  singular,
  numerical_domain,
  cut_locus,
  io,
  unsupported,
  disconnected,
  degenerate,
  internal,
};

const char* to_string(ErrorCode code);

/// Exception type thrown by every module. The code survives the trip through
/// the C API as an integer error code.
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

}  // namespace matman
