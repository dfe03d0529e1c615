#pragma once

#include <functional>
#include <memory>
#include <string>

#include "iikit/domain.hpp"

namespace iikit {

/// Nonnegative weight function on a domain.
///
///   unit          1                          finite [a, b]
///   jacobi(a, b)  (b - t)^alpha (t - a)^beta   finite [a, b], alpha, beta > -1
///   laguerre(a)   t^alpha e^{-t}             half line, alpha > -1
///   hermite       e^{-t^2}                   real line
///   custom        user evaluator             any domain, with an integrability
///                                            certificate supplied by the caller
///
/// Built-in kinds have Gauss rules; custom weights only go through the
/// adaptive integrator.
class WeightSpec {
 public:
  enum class Kind { unit, jacobi, laguerre, hermite, custom };

  using Evaluator = std::function<double(double)>;

  static WeightSpec unit(const Domain& domain);
  static WeightSpec jacobi(double alpha, double beta, const Domain& domain);
  static WeightSpec laguerre(double alpha);
  static WeightSpec hermite();
  /// `integrable` is the caller's certificate that the weight has a finite
  /// integral (finite domains) or that the integrands it will be paired with
  /// decay (infinite domains). The evaluator is sign-checked at sample points.
  static WeightSpec custom(Evaluator eval, const Domain& domain, bool integrable);

  Kind kind() const noexcept { return kind_; }
  const Domain& domain() const noexcept { return domain_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  bool has_gauss_rule() const noexcept { return kind_ != Kind::custom; }

  double operator()(double t) const;

  /// Structural equality; custom weights compare equal only to themselves.
  bool same_as(const WeightSpec& other) const noexcept;

  std::string describe() const;

 private:
  WeightSpec(Kind kind, const Domain& domain, double alpha, double beta)
      : kind_(kind), domain_(domain), alpha_(alpha), beta_(beta) {}

  Kind kind_;
  Domain domain_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::shared_ptr<const Evaluator> custom_;
};

}  // namespace iikit
