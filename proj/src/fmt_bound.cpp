#include "iikit/fmt_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "iikit/error.hpp"

namespace iikit {

FmtSlack::FmtSlack(int rho, std::vector<Eigen::MatrixXd> x_blocks, Eigen::MatrixXd Y)
    : rho_(rho), x_blocks_(std::move(x_blocks)), Y_(std::move(Y)) {
  if (rho_ < 1) fail(ErrorCode::parameter, "rho must be >= 1");
  if (x_blocks_.empty()) fail(ErrorCode::shape, "slack needs at least one X block");
  const Eigen::Index n = x_blocks_.front().rows();
  if (n < 1) fail(ErrorCode::shape, "X blocks must have at least one row");
  for (std::size_t i = 0; i < x_blocks_.size(); ++i) {
    if (x_blocks_[i].rows() != n || x_blocks_[i].cols() != rho_ * n) {
      fail(ErrorCode::shape, "X block " + std::to_string(i) + " must be " + std::to_string(n) +
                                 "x" + std::to_string(rho_ * n));
    }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(rho_) * d() * n;
  if (Y_.rows() != m || Y_.cols() != m) {
    fail(ErrorCode::shape, "Y must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  const double asym = (Y_ - Y_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, Y_.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::shape, "Y must be symmetric");
  }
  Y_ = 0.5 * (Y_ + Y_.transpose());
}

Eigen::MatrixXd FmtSlack::X() const {
  const int n = this->n();
  const int w = rho_ * n;
  Eigen::MatrixXd X(n, w * d());
  for (int i = 0; i < d(); ++i) X.middleCols(i * w, w) = x_blocks_[i];
  return X;
}

Eigen::MatrixXd FmtSlack::X_hat() const {
  const int n = this->n();
  Eigen::MatrixXd Xh(n * d(), rho_ * n);
  for (int i = 0; i < d(); ++i) Xh.middleRows(i * n, n) = x_blocks_[i];
  return Xh;
}

Eigen::MatrixXd build_W(const Eigen::MatrixXd& Y, const PolyFamily& family, int rho, int n) {
  if (rho < 1 || n < 1) fail(ErrorCode::shape, "rho and n must be >= 1");
  const int d = family.size();
  const int w = rho * n;
  if (Y.rows() != d * w || Y.cols() != d * w) {
    fail(ErrorCode::shape, "Y must be " + std::to_string(d * w) + "x" + std::to_string(d * w));
  }
  const Eigen::MatrixXd& Finv = gram_matrix(family).gram;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(w, w);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) W += Finv(i, j) * Y.block(i * w, j * w, w, w);
  }
  return 0.5 * (W + W.transpose());
}

namespace {

double block_margin(const Eigen::MatrixXd& U, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  const Eigen::Index n = U.rows();
  const Eigen::Index m = Y.rows();
  Eigen::MatrixXd B(n + m, n + m);
  B.topLeftCorner(n, n) = U;
  B.topRightCorner(n, m) = -X;
  B.bottomLeftCorner(m, n) = -X.transpose();
  B.bottomRightCorner(m, m) = Y;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

// Eigenvalues below this are indistinguishable from zero for a matrix of the
// given scale.
double zero_threshold(const Eigen::MatrixXd& U, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  const double scale = std::max({U.cwiseAbs().maxCoeff(), X.size() ? X.cwiseAbs().maxCoeff() : 0.0,
                                 Y.cwiseAbs().maxCoeff(), 1e-300});
  const double dim = static_cast<double>(U.rows() + Y.rows());
  return 64.0 * dim * std::numeric_limits<double>::epsilon() * scale;
}

void check_theta(const Eigen::VectorXd& theta, const FmtSlack& slack) {
  if (theta.size() != slack.d() * slack.n()) {
    fail(ErrorCode::shape, "theta must have d n = " + std::to_string(slack.d() * slack.n()) +
                               " entries");
  }
}

void check_W(const Eigen::MatrixXd& W, const FmtSlack& slack) {
  const int w = slack.rho() * slack.n();
  if (W.rows() != w || W.cols() != w) {
    fail(ErrorCode::shape, "W must be " + std::to_string(w) + "x" + std::to_string(w));
  }
}

}  // namespace

Feasibility feasibility_check(const CostMatrix& U, const FmtSlack& slack) {
  if (U.dim() != slack.n()) {
    fail(ErrorCode::shape, "cost matrix size " + std::to_string(U.dim()) +
                               " does not match slack n = " + std::to_string(slack.n()));
  }
  const Eigen::MatrixXd X = slack.X();
  Feasibility f;
  f.margin = block_margin(U.matrix(), X, slack.Y());
  f.feasible = f.margin > zero_threshold(U.matrix(), X, slack.Y());
  return f;
}

FmtBoundResult fmt_bound(const CostMatrix& U, const Eigen::VectorXd& theta, const FmtSlack& slack,
                         const Eigen::MatrixXd& W, const Eigen::VectorXd& z) {
  check_theta(theta, slack);
  check_W(W, slack);
  if (z.size() != W.rows()) fail(ErrorCode::shape, "z must have rho n entries");
  FmtBoundResult r;
  r.W = W;
  r.z_used = z;
  r.lb = 2.0 * theta.dot(slack.X_hat() * z) - z.dot(W * z);
  r.feasible = feasibility_check(U, slack).feasible;
  return r;
}

FmtBoundResult fmt_bound_affine(const CostMatrix& U, const Eigen::MatrixXd& upsilon,
                                const Eigen::VectorXd& y, const FmtSlack& slack,
                                const Eigen::MatrixXd& W, const Eigen::VectorXd& theta) {
  check_theta(theta, slack);
  check_W(W, slack);
  if (upsilon.rows() != theta.size() || upsilon.cols() != W.rows() || y.size() != W.rows()) {
    fail(ErrorCode::shape, "Upsilon must be (d n) x (rho n) and y of length rho n");
  }
  const double mismatch = (upsilon * y - theta).norm();
  if (mismatch > 1e-8 * std::max(1.0, theta.norm())) {
    fail(ErrorCode::consistency, "side condition Upsilon y = theta violated by " +
                                     std::to_string(mismatch));
  }
  const Eigen::MatrixXd UX = upsilon.transpose() * slack.X_hat();
  FmtBoundResult r;
  r.W = W;
  r.z_used = y;
  r.lb = y.dot((UX + UX.transpose() - W) * y);
  r.feasible = feasibility_check(U, slack).feasible;
  return r;
}

Eigen::VectorXd optimal_z(const Eigen::MatrixXd& X_hat, const Eigen::MatrixXd& W,
                          const Eigen::VectorXd& theta) {
  if (W.rows() != W.cols() || X_hat.cols() != W.rows() || X_hat.rows() != theta.size()) {
    fail(ErrorCode::shape, "optimal_z: inconsistent X_hat, W, theta shapes");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (W + W.transpose()));
  if (llt.info() != Eigen::Success) fail(ErrorCode::not_positive_definite, "W is not positive definite");
  return llt.solve(X_hat.transpose() * theta);
}

namespace {

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  std::normal_distribution<double> N(0.0, scale);
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = N(rng);
  return M;
}

}  // namespace

FmtSlack random_feasible_slack(const CostMatrix& U, int d, int rho, std::uint64_t seed,
                               double noise, double eps) {
  if (d < 1 || rho < 1) fail(ErrorCode::parameter, "d and rho must be >= 1");
  if (!(eps > 0.0)) fail(ErrorCode::parameter, "slack epsilon must be positive");
  const int n = U.dim();
  const int w = rho * n;
  std::mt19937_64 rng(seed);
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(d);
  for (int i = 0; i < d; ++i) blocks.push_back(gaussian(rng, n, w, 1.0));
  Eigen::MatrixXd X(n, w * d);
  for (int i = 0; i < d; ++i) X.middleCols(i * w, w) = blocks[i];
  const Eigen::MatrixXd S = gaussian(rng, w * d, w * d, noise);
  Eigen::MatrixXd Y = X.transpose() * U.matrix().llt().solve(X) + S.transpose() * S;
  Y.diagonal().array() += eps;
  Y = 0.5 * (Y + Y.transpose());
  return FmtSlack(rho, std::move(blocks), std::move(Y));
}

namespace {

struct Evaluated {
  double lb = -std::numeric_limits<double>::infinity();
  double margin = 0.0;
  Eigen::VectorXd winv_u;  // W^{-1} X_hat^T theta
};

Evaluated evaluate(const CostMatrix& U, const Eigen::VectorXd& theta, const FmtSlack& slack,
                   const Eigen::LLT<Eigen::MatrixXd>& Wllt) {
  Evaluated e;
  const Eigen::MatrixXd X = slack.X();
  e.margin = block_margin(U.matrix(), X, slack.Y());
  if (!(e.margin > zero_threshold(U.matrix(), X, slack.Y()))) return e;
  const Eigen::VectorXd u = slack.X_hat().transpose() * theta;
  e.winv_u = Wllt.solve(u);
  e.lb = u.dot(e.winv_u);
  return e;
}

// Ascent over the X blocks with Y (hence W) held fixed. The objective
// theta^T X_hat W^{-1} X_hat^T theta has gradient 2 theta_i (W^{-1} u)^T in X_i.
double ascend(const CostMatrix& U, const Eigen::VectorXd& theta, FmtSlack slack,
              const Eigen::MatrixXd& W, int iterations) {
  Eigen::LLT<Eigen::MatrixXd> Wllt(W);
  if (Wllt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const int n = slack.n();
  const int d = slack.d();
  Evaluated cur = evaluate(U, theta, slack, Wllt);
  if (!std::isfinite(cur.lb)) return cur.lb;
  double step = 1.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<Eigen::MatrixXd> grad(d);
    double gnorm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      grad[i] = 2.0 * theta.segment(i * n, n) * cur.winv_u.transpose();
      gnorm2 += grad[i].squaredNorm();
    }
    if (gnorm2 == 0.0) break;
    const double gnorm = std::sqrt(gnorm2);
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      std::vector<Eigen::MatrixXd> trial = slack.x_blocks();
      for (int i = 0; i < d; ++i) trial[i] += (step / gnorm) * grad[i];
      FmtSlack cand(slack.rho(), std::move(trial), slack.Y());
      Evaluated next = evaluate(U, theta, cand, Wllt);
      if (std::isfinite(next.lb) && next.lb > cur.lb) {
        slack = std::move(cand);
        cur = std::move(next);
        accepted = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return cur.lb;
}

}  // namespace

ProbeResult equivalence_probe(const PolyFamily& family, const Signal& x, const CostMatrix& U,
                              const ProbeOptions& options) {
  if (options.budget < 1) fail(ErrorCode::parameter, "probe budget must be >= 1");
  if (options.ascent_iterations < 0) fail(ErrorCode::parameter, "ascent iterations must be >= 0");
  const int d = family.size();
  const int rho = options.rho == 0 ? d : options.rho;
  if (rho < 1) fail(ErrorCode::parameter, "rho must be >= 1");

  const BoundReport t1 = lower_bound(family, x, U, options.bound);
  ProbeResult out;
  out.rho = rho;
  out.theorem1_lb = t1.lower;
  out.best_fmt_lb = -std::numeric_limits<double>::infinity();

  // Restarts draw from independent sub-seeds so the best is a deterministic
  // max over the seeded set.
  std::mt19937_64 seeder(options.seed);
  for (int r = 0; r < options.budget; ++r) {
    const std::uint64_t sub = seeder();
    const FmtSlack slack = random_feasible_slack(U, d, rho, sub, options.noise, options.eps);
    const Eigen::MatrixXd W = build_W(slack.Y(), family, rho, U.dim());
    const double lb = ascend(U, t1.theta, slack, W, options.ascent_iterations);
    out.best_fmt_lb = std::max(out.best_fmt_lb, lb);
  }
  const double tiny = 1e-300;
  if (std::abs(out.theorem1_lb) > tiny) {
    out.ratio = out.best_fmt_lb / out.theorem1_lb;
  } else {
    out.ratio = out.best_fmt_lb <= options.dominance_tol ? 1.0
                                                         : std::numeric_limits<double>::infinity();
  }
  out.warning = out.ratio < options.warn_ratio;
  out.dominance_violated = out.ratio > 1.0 + options.dominance_tol;
  return out;
}

}  // namespace iikit
