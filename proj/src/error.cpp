#include "iikit/error.hpp"

namespace iikit {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::rank: return "rank";
    case ErrorCode::singular_gram: return "singular-gram";
    case ErrorCode::not_positive_definite: return "not-positive-definite";
    case ErrorCode::shape: return "shape";
    case ErrorCode::nonconvergence: return "nonconvergence";
    case ErrorCode::unsupported_weight: return "unsupported-weight";
    case ErrorCode::consistency: return "consistency";
    case ErrorCode::schema: return "schema";
  }
  return "unknown";
}

}  // namespace iikit
