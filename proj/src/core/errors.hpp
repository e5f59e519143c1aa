#pragma once

#include <stdexcept>
#include <string>

namespace ks1d {

// Numeric values are part of the C API (see include/ks1d/ks1d.h) and must not
// be renumbered.
enum class ErrorCode : int {
  InputDomain = 1,
  DivergentTail = 2,
  Range = 3,
  NumericState = 4,
  Resolution = 5,
  Solver = 6,
  Validation = 7,
  Config = 8,
  CannotCertify = 9,
  Io = 10,
  Internal = 11,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace ks1d
