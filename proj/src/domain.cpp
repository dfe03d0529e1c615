#include "iikit/domain.hpp"

#include <sstream>

#include "iikit/error.hpp"

namespace iikit {

Domain Domain::finite(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
    std::ostringstream os;
    os << "degenerate domain [" << a << ", " << b << "]: need finite a < b";
    fail(ErrorCode::domain, os.str());
  }
  return Domain(Kind::finite, a, b);
}

bool Domain::contains(double t) const noexcept {
  switch (kind_) {
    case Kind::finite: return t >= a_ && t <= b_;
    case Kind::half_line: return t >= 0.0 && std::isfinite(t);
    case Kind::real_line: return std::isfinite(t);
  }
  return false;
}

std::string Domain::describe() const {
  switch (kind_) {
    case Kind::finite: {
      std::ostringstream os;
      os.precision(17);
      os << "[" << a_ << ", " << b_ << "]";
      return os.str();
    }
    case Kind::half_line: return "[0, inf)";
    case Kind::real_line: return "(-inf, inf)";
  }
  return "?";
}

}  // namespace iikit
