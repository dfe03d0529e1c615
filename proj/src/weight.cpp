#include "iikit/weight.hpp"

#include <cmath>
#include <sstream>

#include "iikit/error.hpp"

namespace iikit {

namespace {

void require_finite(const Domain& domain, const char* what) {
  if (!domain.is_finite()) {
    fail(ErrorCode::domain, std::string(what) + " weight needs a finite domain, got " +
                                domain.describe());
  }
}

void require_exponent(double e, const char* name) {
  if (!(e > -1.0) || !std::isfinite(e)) {
    std::ostringstream os;
    os << name << " = " << e << " violates " << name << " > -1";
    fail(ErrorCode::parameter, os.str());
  }
}

}  // namespace

WeightSpec WeightSpec::unit(const Domain& domain) {
  require_finite(domain, "unit");
  return WeightSpec(Kind::unit, domain, 0.0, 0.0);
}

WeightSpec WeightSpec::jacobi(double alpha, double beta, const Domain& domain) {
  require_exponent(alpha, "alpha");
  require_exponent(beta, "beta");
  require_finite(domain, "jacobi");
  return WeightSpec(Kind::jacobi, domain, alpha, beta);
}

WeightSpec WeightSpec::laguerre(double alpha) {
  require_exponent(alpha, "alpha");
  return WeightSpec(Kind::laguerre, Domain::half_line(), alpha, 0.0);
}

WeightSpec WeightSpec::hermite() {
  return WeightSpec(Kind::hermite, Domain::real_line(), 0.0, 0.0);
}

WeightSpec WeightSpec::custom(Evaluator eval, const Domain& domain, bool integrable) {
  if (!eval) fail(ErrorCode::parameter, "custom weight without evaluator");
  if (!integrable) {
    fail(ErrorCode::parameter,
         "custom weight on " + domain.describe() + " requires an integrability certificate");
  }
  // Sign guard at sample points only; zero sets are not inspected.
  for (int k = 1; k < 64; ++k) {
    const double u = k / 64.0;
    double t = 0.0;
    switch (domain.kind()) {
      case Domain::Kind::finite: t = domain.a() + u * domain.length(); break;
      case Domain::Kind::half_line: t = u / (1.0 - u); break;
      case Domain::Kind::real_line: t = (2.0 * u - 1.0) / (1.0 - (2.0 * u - 1.0) * (2.0 * u - 1.0)); break;
    }
    const double w = eval(t);
    if (!(w >= 0.0)) {
      std::ostringstream os;
      os << "custom weight is negative or NaN at t = " << t << " (value " << w << ")";
      fail(ErrorCode::parameter, os.str());
    }
  }
  WeightSpec spec(Kind::custom, domain, 0.0, 0.0);
  spec.custom_ = std::make_shared<const Evaluator>(std::move(eval));
  return spec;
}

double WeightSpec::operator()(double t) const {
  switch (kind_) {
    case Kind::unit: return 1.0;
    case Kind::jacobi: {
      double w = 1.0;
      if (alpha_ != 0.0) w *= std::pow(domain_.b() - t, alpha_);
      if (beta_ != 0.0) w *= std::pow(t - domain_.a(), beta_);
      return w;
    }
    case Kind::laguerre: return (alpha_ != 0.0 ? std::pow(t, alpha_) : 1.0) * std::exp(-t);
    case Kind::hermite: return std::exp(-t * t);
    case Kind::custom: return (*custom_)(t);
  }
  return 0.0;
}

bool WeightSpec::same_as(const WeightSpec& other) const noexcept {
  if (kind_ == Kind::custom || other.kind_ == Kind::custom) {
    return kind_ == other.kind_ && custom_ == other.custom_ && domain_ == other.domain_;
  }
  // unit and jacobi(0, 0) are the same weight.
  const auto normalized = [](const WeightSpec& w) {
    return w.kind_ == Kind::unit ? Kind::jacobi : w.kind_;
  };
  return normalized(*this) == normalized(other) && domain_ == other.domain_ &&
         alpha_ == other.alpha_ && beta_ == other.beta_;
}

std::string WeightSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::unit: os << "unit"; break;
    case Kind::jacobi: os << "jacobi(" << alpha_ << ", " << beta_ << ")"; break;
    case Kind::laguerre: os << "laguerre(" << alpha_ << ")"; break;
    case Kind::hermite: os << "hermite"; break;
    case Kind::custom: os << "custom"; break;
  }
  os << " on " << domain_.describe();
  return os.str();
}

}  // namespace iikit
