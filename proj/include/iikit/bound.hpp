#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "iikit/error.hpp"
#include "iikit/gram.hpp"
#include "iikit/polyalg.hpp"
#include "iikit/quad.hpp"

namespace iikit {

/// Vector function x(t) in R^n: either polynomial (exact quadrature) or a
/// black-box evaluator (adaptive quadrature).
class Signal {
 public:
  /// Row j of `coeffs` holds the monomial coefficients of x_j.
  static Signal polynomial(Eigen::MatrixXd coeffs, const Domain& domain);
  /// `decays` is the caller's square-integrability certificate; it is
  /// mandatory on infinite domains.
  static Signal function(int n, VectorFn eval, const Domain& domain, bool decays = false);

  int dim() const noexcept { return n_; }
  const Domain& domain() const noexcept { return domain_; }
  bool is_polynomial() const noexcept { return coeffs_.has_value(); }
  /// Polynomial degree (poly signals only).
  int degree() const;
  const Eigen::MatrixXd& coeffs() const;
  bool decays() const noexcept { return decays_; }

  Eigen::VectorXd operator()(double t) const;

  Signal scaled(double s) const;

 private:
  Signal(int n, const Domain& domain) : n_(n), domain_(domain) {}

  int n_;
  Domain domain_;
  std::optional<Eigen::MatrixXd> coeffs_;
  VectorFn eval_;
  bool decays_ = false;
};

/// Symmetric positive definite U, validated by Cholesky.
class CostMatrix {
 public:
  explicit CostMatrix(Eigen::MatrixXd U);
  static CostMatrix identity(int n) { return CostMatrix(Eigen::MatrixXd::Identity(n, n)); }

  const Eigen::MatrixXd& matrix() const noexcept { return U_; }
  int dim() const noexcept { return static_cast<int>(U_.rows()); }

 private:
  Eigen::MatrixXd U_;
};

struct BoundReport {
  double upper = 0.0;
  double lower = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  Eigen::VectorXd theta;    // moments, d blocks of n
  Eigen::VectorXd lambda;   // (F (x) I_n) theta
  double residual_norm = 0.0;  // sqrt(int w eps^T U eps), by quadrature
  Eigen::VectorXd orthogonality_defects;  // ||int w f_i eps||, per kernel
  GramPair gram;
};

struct LeastSquaresFit {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd kappa;  // d x n: column j approximates x_j = kappa_j^T f
  double residual_norm = 0.0;
  Eigen::VectorXd orthogonality_defects;
};

struct TransformedBound {
  double lb_original = 0.0;
  double lb_transformed = 0.0;
};

struct SweepResult {
  std::vector<int> levels;
  std::vector<BoundReport> reports;
  bool monotone = true;
};

struct CauchyCheck {
  Eigen::VectorXd nested_value;
  Eigen::VectorXd weighted_value;
  double discrepancy = 0.0;
};

struct ReductionCheck {
  double lb_jacobi = 0.0;
  double lb_reduced = 0.0;
  double discrepancy = 0.0;  // relative: |difference| / max(|lb_jacobi|, tiny)
};

/// Options threaded through the bound engine.
struct BoundOptions {
  IntegrateOptions quad;
  double pd_tol = kDefaultPdTol;
  /// Tolerance used by hierarchy_sweep's monotonicity flag (relative to
  /// max(1, lb_d)).
  double monotone_tol = 1e-10;
};

/// theta = int w (f (x) I_n) x, stacked as d blocks of size n.
Eigen::VectorXd moment_vector(const PolyFamily& family, const Signal& x,
                              const BoundOptions& options = {});

/// int w x^T U x.
double upper_bound(const Signal& x, const CostMatrix& U, const WeightSpec& weight,
                   const BoundOptions& options = {});

/// theta^T (F (x) U) theta with full diagnostics.
BoundReport lower_bound(const PolyFamily& family, const Signal& x, const CostMatrix& U,
                        const BoundOptions& options = {});

/// lambda from (F (x) I_n) theta, kappa from the normal equations, residual
/// and orthogonality defects by quadrature.
LeastSquaresFit least_squares_diagnostics(const PolyFamily& family, const Signal& x,
                                          const CostMatrix& U,
                                          const BoundOptions& options = {});

/// Sy(theta^T (I_d (x) U) omega) - omega^T (F^{-1} (x) U) omega: the bound
/// obtained from an arbitrary coefficient vector omega.
double omega_objective(const Eigen::VectorXd& theta, const Eigen::MatrixXd& gram,
                       const CostMatrix& U, const Eigen::VectorXd& omega);

/// Lower bound of the original family and of phi = G f (own Gram matrix).
TransformedBound transformed_bound(const PolyFamily& family, const Eigen::MatrixXd& G,
                                   const Signal& x, const CostMatrix& U,
                                   const BoundOptions& options = {});

using FamilyBuilder = std::function<PolyFamily(int)>;

/// Lower bounds for d = d_min..d_max. builder(d + 1) must extend builder(d)
/// (prefix structure); violations raise a parameter error. A singular Gram at
/// any level raises SweepError naming that level.
SweepResult hierarchy_sweep(const FamilyBuilder& builder, const Signal& x,
                            const CostMatrix& U, int d_min, int d_max,
                            const BoundOptions& options = {});

class SweepError : public Error {
 public:
  SweepError(const Error& cause, int level)
      : Error(cause.code(), std::string(cause.what()) + " (at d = " +
                                std::to_string(level) + ")"),
        level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

/// Nested repeated integral against the single weighted integral
/// int (b - t)^p x (lower) or int (t - a)^p x (upper).
CauchyCheck cauchy_identity_check(const Signal& x, int p, Side side,
                                  const BoundOptions& options = {});

/// Lower bound with kernel j^{0,p}_d and weight (t - a)^p, computed directly
/// and through unweighted Legendre moments of order d + p.
ReductionCheck weighted_moment_reduction(int p, int d, double a, double b,
                                         const Signal& x, const CostMatrix& U,
                                         const BoundOptions& options = {});

/// Xi = ((J L^{-1}) (x) I_n)(P (x) I_n), mapping unweighted Legendre moments of
/// order d + p to the weighted j^{0,p}_d moments.
Eigen::MatrixXd reduction_operator(int p, int d, double a, double b, int n);

}  // namespace iikit
