#include "iikit/bound.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "iikit/error.hpp"

namespace iikit {

// ---------------------------------------------------------------------------
// Signal / CostMatrix

Signal Signal::polynomial(Eigen::MatrixXd coeffs, const Domain& domain) {
  if (coeffs.rows() < 1 || coeffs.cols() < 1) {
    fail(ErrorCode::shape, "polynomial signal needs at least one row and one coefficient");
  }
  Eigen::Index cols = coeffs.cols();
  while (cols > 1 && coeffs.col(cols - 1).isZero(0.0)) --cols;
  Signal s(static_cast<int>(coeffs.rows()), domain);
  s.coeffs_ = coeffs.leftCols(cols);
  s.decays_ = domain.is_finite();
  return s;
}

Signal Signal::function(int n, VectorFn eval, const Domain& domain, bool decays) {
  if (n < 1) fail(ErrorCode::shape, "signal dimension must be >= 1");
  if (!eval) fail(ErrorCode::parameter, "signal evaluator is empty");
  if (!domain.is_finite() && !decays) {
    fail(ErrorCode::parameter, "signal on " + domain.describe() +
                                   " requires a square-integrability (decay) certificate");
  }
  Signal s(n, domain);
  s.eval_ = std::move(eval);
  s.decays_ = decays;
  return s;
}

int Signal::degree() const {
  if (!coeffs_) fail(ErrorCode::parameter, "black-box signal has no polynomial degree");
  return static_cast<int>(coeffs_->cols()) - 1;
}

const Eigen::MatrixXd& Signal::coeffs() const {
  if (!coeffs_) fail(ErrorCode::parameter, "black-box signal has no coefficients");
  return *coeffs_;
}

Eigen::VectorXd Signal::operator()(double t) const {
  if (!coeffs_) {
    Eigen::VectorXd v = eval_(t);
    if (v.size() != n_) {
      fail(ErrorCode::shape, "signal evaluator returned " + std::to_string(v.size()) +
                                 " entries, expected " + std::to_string(n_));
    }
    return v;
  }
  const Eigen::MatrixXd& c = *coeffs_;
  Eigen::VectorXd acc = c.col(c.cols() - 1);
  for (Eigen::Index k = c.cols() - 2; k >= 0; --k) acc = acc * t + c.col(k);
  return acc;
}

Signal Signal::scaled(double s) const {
  if (coeffs_) return polynomial(*coeffs_ * s, domain_);
  VectorFn inner = eval_;
  return function(n_, [inner, s](double t) -> Eigen::VectorXd { return s * inner(t); }, domain_,
                  decays_);
}

CostMatrix::CostMatrix(Eigen::MatrixXd U) : U_(std::move(U)) {
  if (U_.rows() != U_.cols() || U_.rows() < 1) {
    fail(ErrorCode::shape, "cost matrix must be square and nonempty");
  }
  const double asym = (U_ - U_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, U_.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::not_positive_definite, "cost matrix is not symmetric");
  }
  U_ = 0.5 * (U_ + U_.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(U_);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::not_positive_definite, "cost matrix is not positive definite");
  }
}

// ---------------------------------------------------------------------------
// helpers

namespace {

void require_same_domain(const PolyFamily& family, const Signal& x) {
  if (!(family.domain() == x.domain())) {
    fail(ErrorCode::domain, "kernel family lives on " + family.domain().describe() +
                                " but the signal on " + x.domain().describe());
  }
}

void require_dims(const Signal& x, const CostMatrix& U) {
  if (x.dim() != U.dim()) {
    fail(ErrorCode::shape, "signal dimension " + std::to_string(x.dim()) +
                               " does not match cost matrix size " + std::to_string(U.dim()));
  }
}

IntegrateOptions with_degree(const BoundOptions& options, const Signal& x, int degree) {
  IntegrateOptions q = options.quad;
  if (x.is_polynomial()) q.polynomial_degree = degree;
  else q.polynomial_degree.reset();
  return q;
}

Eigen::VectorXd eval_kernels(const PolyFamily& family, double t) {
  Eigen::VectorXd v(family.size());
  for (int i = 0; i < family.size(); ++i) v(i) = family[i](t);
  return v;
}

// d x n matrix view of a stacked dn vector (row i = block i).
Eigen::MatrixXd blocks_as_rows(const Eigen::VectorXd& v, int d, int n) {
  Eigen::MatrixXd M(d, n);
  for (int i = 0; i < d; ++i) M.row(i) = v.segment(i * n, n).transpose();
  return M;
}

Eigen::VectorXd rows_as_blocks(const Eigen::MatrixXd& M) {
  Eigen::VectorXd v(M.size());
  for (Eigen::Index i = 0; i < M.rows(); ++i) v.segment(i * M.cols(), M.cols()) = M.row(i).transpose();
  return v;
}

struct Residual {
  double energy = 0.0;
  Eigen::VectorXd defects;
};

// int w eps^T U eps and ||int w f_i eps|| for eps = x - (f^T (x) I_n) lambda,
// by direct quadrature of the residual.
Residual residual_quadrature(const PolyFamily& family, const Signal& x, const CostMatrix& U,
                             const Eigen::VectorXd& lambda, const BoundOptions& options) {
  const int d = family.size();
  const int n = x.dim();
  const Eigen::MatrixXd Lam = blocks_as_rows(lambda, d, n);
  const Eigen::MatrixXd& Um = U.matrix();
  MatrixFn integrand = [&](double t) -> Eigen::MatrixXd {
    const Eigen::VectorXd f = eval_kernels(family, t);
    const Eigen::VectorXd eps = x(t) - Lam.transpose() * f;
    Eigen::MatrixXd out(d + 1, n);
    out.row(0).setZero();
    out(0, 0) = eps.dot(Um * eps);
    out.bottomRows(d) = f * eps.transpose();
    return out;
  };
  const int eps_degree = x.is_polynomial() ? std::max(x.degree(), family.max_degree()) : 0;
  const Eigen::MatrixXd r =
      integrate(integrand, family.weight(), with_degree(options, x, 2 * eps_degree));
  Residual out;
  out.energy = r(0, 0);
  out.defects.resize(d);
  for (int i = 0; i < d; ++i) out.defects(i) = r.row(i + 1).norm();
  return out;
}

double quadratic_lower(const Eigen::VectorXd& theta, const Eigen::MatrixXd& F, const CostMatrix& U) {
  return theta.dot(kron(F, U.matrix()) * theta);
}

}  // namespace

// ---------------------------------------------------------------------------

Eigen::VectorXd moment_vector(const PolyFamily& family, const Signal& x,
                              const BoundOptions& options) {
  require_same_domain(family, x);
  const int d = family.size();
  MatrixFn integrand = [&](double t) -> Eigen::MatrixXd {
    return eval_kernels(family, t) * x(t).transpose();
  };
  const int degree = family.max_degree() + (x.is_polynomial() ? x.degree() : 0);
  const Eigen::MatrixXd M = integrate(integrand, family.weight(), with_degree(options, x, degree));
  (void)d;
  return rows_as_blocks(M);
}

double upper_bound(const Signal& x, const CostMatrix& U, const WeightSpec& weight,
                   const BoundOptions& options) {
  require_dims(x, U);
  if (!(weight.domain() == x.domain())) {
    fail(ErrorCode::domain, "weight lives on " + weight.domain().describe() +
                                " but the signal on " + x.domain().describe());
  }
  const Eigen::MatrixXd& Um = U.matrix();
  MatrixFn integrand = [&](double t) -> Eigen::MatrixXd {
    const Eigen::VectorXd v = x(t);
    return Eigen::MatrixXd::Constant(1, 1, v.dot(Um * v));
  };
  const int degree = x.is_polynomial() ? 2 * x.degree() : 0;
  return integrate(integrand, weight, with_degree(options, x, degree))(0, 0);
}

BoundReport lower_bound(const PolyFamily& family, const Signal& x, const CostMatrix& U,
                        const BoundOptions& options) {
  require_dims(x, U);
  BoundReport r;
  r.gram = gram_matrix(family, options.pd_tol);
  r.theta = moment_vector(family, x, options);
  r.lower = quadratic_lower(r.theta, r.gram.inverse, U);
  r.upper = upper_bound(x, U, family.weight(), options);
  r.gap = r.upper - r.lower;
  r.relative_gap = r.gap / std::max(r.upper, 1e-300);
  r.lambda = kron_lift(r.gram.inverse, x.dim()) * r.theta;
  const Residual res = residual_quadrature(family, x, U, r.lambda, options);
  r.residual_norm = std::sqrt(std::max(res.energy, 0.0));
  r.orthogonality_defects = res.defects;
  return r;
}

LeastSquaresFit least_squares_diagnostics(const PolyFamily& family, const Signal& x,
                                          const CostMatrix& U, const BoundOptions& options) {
  require_dims(x, U);
  const GramPair g = gram_matrix(family, options.pd_tol);
  const Eigen::VectorXd theta = moment_vector(family, x, options);
  LeastSquaresFit fit;
  fit.lambda = kron_lift(g.inverse, x.dim()) * theta;
  // Normal equations F^{-1} kappa_j = int w x_j f, one column per component.
  fit.kappa = g.gram.llt().solve(blocks_as_rows(theta, family.size(), x.dim()));
  const Residual res = residual_quadrature(family, x, U, fit.lambda, options);
  fit.residual_norm = std::sqrt(std::max(res.energy, 0.0));
  fit.orthogonality_defects = res.defects;
  return fit;
}

double omega_objective(const Eigen::VectorXd& theta, const Eigen::MatrixXd& gram,
                       const CostMatrix& U, const Eigen::VectorXd& omega) {
  const int d = static_cast<int>(gram.rows());
  const Eigen::MatrixXd IU = kron(Eigen::MatrixXd::Identity(d, d), U.matrix());
  return 2.0 * theta.dot(IU * omega) - omega.dot(kron(gram, U.matrix()) * omega);
}

TransformedBound transformed_bound(const PolyFamily& family, const Eigen::MatrixXd& G,
                                   const Signal& x, const CostMatrix& U,
                                   const BoundOptions& options) {
  if (G.rows() != family.size() || G.cols() != family.size()) {
    fail(ErrorCode::shape, "transform G must be " + std::to_string(family.size()) + "x" +
                               std::to_string(family.size()));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  const auto& sv = svd.singularValues();
  if (!(sv.minCoeff() > 1e-14 * sv.maxCoeff())) {
    fail(ErrorCode::rank, "transform G is singular");
  }
  TransformedBound out;
  out.lb_original = lower_bound(family, x, U, options).lower;
  out.lb_transformed = lower_bound(transform_family(G, family), x, U, options).lower;
  return out;
}

namespace {

bool extends(const PolyFamily& longer, const PolyFamily& shorter) {
  if (longer.size() <= shorter.size()) return false;
  if (!longer.weight().same_as(shorter.weight())) return false;
  for (int i = 0; i < shorter.size(); ++i) {
    const auto& a = longer[i].coeffs();
    const auto& b = shorter[i].coeffs();
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (std::abs(a[k] - b[k]) > 1e-14 * std::max(1.0, std::abs(b[k]))) return false;
    }
  }
  return true;
}

}  // namespace

SweepResult hierarchy_sweep(const FamilyBuilder& builder, const Signal& x, const CostMatrix& U,
                            int d_min, int d_max, const BoundOptions& options) {
  if (d_min < 1 || d_max < d_min) {
    fail(ErrorCode::parameter, "sweep range must satisfy 1 <= d_min <= d_max");
  }
  SweepResult out;
  std::optional<PolyFamily> previous;
  for (int d = d_min; d <= d_max; ++d) {
    PolyFamily family = builder(d);
    if (previous && !extends(family, *previous)) {
      fail(ErrorCode::parameter, "sweep family at d = " + std::to_string(d) +
                                     " does not extend the family at d = " + std::to_string(d - 1));
    }
    BoundReport report;
    try {
      report = lower_bound(family, x, U, options);
    } catch (const Error& e) {
      throw SweepError(e, d);
    }
    if (!out.reports.empty()) {
      const double prev = out.reports.back().lower;
      if (report.lower < prev - options.monotone_tol * std::max(1.0, prev)) out.monotone = false;
    }
    out.levels.push_back(d);
    out.reports.push_back(std::move(report));
    previous = std::move(family);
  }
  return out;
}

CauchyCheck cauchy_identity_check(const Signal& x, int p, Side side, const BoundOptions& options) {
  const Domain& dom = x.domain();
  if (!dom.is_finite()) fail(ErrorCode::domain, "Cauchy identity needs a finite domain");
  if (p < 1) fail(ErrorCode::parameter, "Cauchy identity order p must be >= 1");
  CauchyCheck out;
  VectorFn f = [&](double t) { return x(t); };
  out.nested_value = repeated_integral(f, p, side, dom.a(), dom.b(), options.quad);

  const WeightSpec w = side == Side::lower ? WeightSpec::jacobi(p, 0.0, dom)
                                           : WeightSpec::jacobi(0.0, p, dom);
  MatrixFn g = [&](double t) -> Eigen::MatrixXd { return x(t); };
  const int degree = x.is_polynomial() ? x.degree() : 0;
  out.weighted_value = integrate(g, w, with_degree(options, x, degree));
  out.discrepancy = (out.nested_value - out.weighted_value).cwiseAbs().maxCoeff();
  return out;
}

Eigen::MatrixXd reduction_operator(int p, int d, double a, double b, int n) {
  if (p < 1) fail(ErrorCode::parameter, "reduction power p must be >= 1");
  if (d < 0) fail(ErrorCode::parameter, "reduction degree d must be >= 0");
  const PolyFamily jac = jacobi_family(d, 0.0, p, a, b);
  const PolyFamily leg = legendre_family(d, a, b);
  const PolyFamily mono = monomial_family(d, leg.weight());
  const Eigen::MatrixXd J = basis_change(jac, mono);
  const Eigen::MatrixXd L = basis_change(leg, mono);
  // J L^{-1} = (L^{-T} J^T)^T
  const Eigen::MatrixXd JLinv = L.transpose().fullPivLu().solve(J.transpose()).transpose();
  const Eigen::MatrixXd P = weight_shift_matrix(p, d, a, b);
  return kron_lift(JLinv, n) * kron_lift(P, n);
}

ReductionCheck weighted_moment_reduction(int p, int d, double a, double b, const Signal& x,
                                         const CostMatrix& U, const BoundOptions& options) {
  require_dims(x, U);
  const PolyFamily jac = jacobi_family(d, 0.0, p, a, b);
  ReductionCheck out;
  out.lb_jacobi = lower_bound(jac, x, U, options).lower;

  const Eigen::MatrixXd Xi = reduction_operator(p, d, a, b, x.dim());
  const Eigen::VectorXd mu = moment_vector(legendre_family(d + p, a, b), x, options);
  const Eigen::VectorXd theta = Xi * mu;
  Eigen::VectorXd D(d + 1);
  for (int k = 0; k <= d; ++k) D(k) = (2.0 * k + 1.0 + p) / std::pow(b - a, p + 1.0);
  out.lb_reduced = quadratic_lower(theta, D.asDiagonal().toDenseMatrix(), U);
  out.discrepancy = std::abs(out.lb_jacobi - out.lb_reduced) / std::max(std::abs(out.lb_jacobi), 1e-300);
  return out;
}

}  // namespace iikit
