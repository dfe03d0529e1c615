#pragma once

#include <stdexcept>
#include <string>

namespace iikit {

// Error categories. The C API maps these one-to-one onto iikit_status codes.
enum class ErrorCode {
  domain,            // degenerate or mismatched domain, point outside domain
  parameter,         // invalid family/weight parameter (alpha <= -1, dmax cap, ...)
  rank,              // inconsistent or rank-deficient coefficient matching
  singular_gram,     // Gramian criterion fails: kernels linearly dependent
  not_positive_definite,
  shape,             // non-conformable matrix dimensions
  nonconvergence,    // adaptive quadrature refinement cap reached
  unsupported_weight,
  consistency,       // side condition violated (e.g. affine FMT form)
  schema,            // experiment configuration errors
};

const char* to_string(ErrorCode code) noexcept;

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

}  // namespace iikit
