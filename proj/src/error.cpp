#include "matman/error.hpp"

namespace matman {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid input";
    case ErrorCode::not_positive_definite: return "not positive definite";
    case ErrorCode::singular: return "singular";
    case ErrorCode::numerical_domain: return "numerical domain";
    case ErrorCode::cut_locus: return "cut locus";
    case ErrorCode::io: return "i/o";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::disconnected: return "disconnected";
    case ErrorCode::degenerate: return "degenerate configuration";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace matman
