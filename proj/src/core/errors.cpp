#include "core/errors.hpp"

namespace ks1d {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InputDomain: return "input-domain";
    case ErrorCode::DivergentTail: return "divergent-tail";
    case ErrorCode::Range: return "range";
    case ErrorCode::NumericState: return "numeric-state";
    case ErrorCode::Resolution: return "resolution";
    case ErrorCode::Solver: return "solver";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Config: return "config";
    case ErrorCode::CannotCertify: return "cannot-certify";
    case ErrorCode::Io: return "io";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + " error: " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ks1d
