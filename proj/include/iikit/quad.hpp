#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "iikit/weight.hpp"

namespace iikit {

/// Gauss rule: sum_k weights[k] g(nodes[k]) approximates the weighted integral
/// of g, exactly when g is a polynomial of degree <= exact_degree.
struct QuadRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int exact_degree = -1;

  int size() const noexcept { return static_cast<int>(nodes.size()); }
};

/// m-point Gauss rule for a built-in weight (Golub-Welsch on the three-term
/// recurrence, Newton-polished nodes, Christoffel weights).
QuadRule gauss_rule(const WeightSpec& weight, int m);

inline constexpr double kDefaultQuadTol = 1e-10;
inline constexpr int kDefaultRefinementCap = 20;

using MatrixFn = std::function<Eigen::MatrixXd(double)>;
using VectorFn = std::function<Eigen::VectorXd(double)>;

struct IntegrateOptions {
  double tol = kDefaultQuadTol;   // absolute, max-entry norm
  int refinement_cap = kDefaultRefinementCap;
  /// Set when the integrand is known to be a polynomial of this degree; the
  /// integral is then taken with an exact Gauss rule.
  std::optional<int> polynomial_degree;
};

struct IntegrateResult {
  Eigen::MatrixXd value;
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// Weighted integral of a matrix-valued integrand over the weight's domain.
IntegrateResult integrate_detailed(const MatrixFn& f, const WeightSpec& weight,
                                   const IntegrateOptions& options = {});

inline Eigen::MatrixXd integrate(const MatrixFn& f, const WeightSpec& weight,
                                 const IntegrateOptions& options = {}) {
  return integrate_detailed(f, weight, options).value;
}

/// Unweighted integral of f over [a, b].
Eigen::MatrixXd integrate_interval(const MatrixFn& f, double a, double b,
                                   const IntegrateOptions& options = {});

enum class Side { lower, upper };

/// p! * nested integral of order p + 1 (Cauchy repeated integration):
///   lower: p! int_a^b int_a^{t1} ... int_a^{tp} f(t_{p+1})
///   upper: p! int_a^b int_{t1}^b ... int_{tp}^b f(t_{p+1})
/// evaluated by literally nesting the adaptive integrator.
Eigen::VectorXd repeated_integral(const VectorFn& f, int order, Side side,
                                  double a, double b,
                                  const IntegrateOptions& options = {});

}  // namespace iikit
