#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "iikit/bound.hpp"

namespace iikit {

/// Slack variables of the free-matrix inequality.
///   X     = [X_1 ... X_d]      n x (rho d n)
///   X_hat = col(X_1, ..., X_d) (d n) x (rho n)
///   Y     symmetric            (rho d n) x (rho d n)
class FmtSlack {
 public:
  FmtSlack(int rho, std::vector<Eigen::MatrixXd> x_blocks, Eigen::MatrixXd Y);

  int rho() const noexcept { return rho_; }
  int d() const noexcept { return static_cast<int>(x_blocks_.size()); }
  int n() const noexcept { return static_cast<int>(x_blocks_.front().rows()); }
  const std::vector<Eigen::MatrixXd>& x_blocks() const noexcept { return x_blocks_; }
  const Eigen::MatrixXd& Y() const noexcept { return Y_; }

  Eigen::MatrixXd X() const;
  Eigen::MatrixXd X_hat() const;

 private:
  int rho_;
  std::vector<Eigen::MatrixXd> x_blocks_;
  Eigen::MatrixXd Y_;
};

struct FmtBoundResult {
  double lb = 0.0;
  Eigen::MatrixXd W;
  Eigen::VectorXd z_used;
  bool feasible = false;
};

struct Feasibility {
  bool feasible = false;
  double margin = 0.0;  // smallest eigenvalue of [[U, -X], [-X^T, Y]]
};

/// W = sum_{ij} (F^{-1})_{ij} Y_{ij}, Y_{ij} the (rho n)-sized blocks of Y.
Eigen::MatrixXd build_W(const Eigen::MatrixXd& Y, const PolyFamily& family, int rho, int n);

Feasibility feasibility_check(const CostMatrix& U, const FmtSlack& slack);

/// lb = 2 theta^T X_hat z - z^T W z.
FmtBoundResult fmt_bound(const CostMatrix& U, const Eigen::VectorXd& theta,
                         const FmtSlack& slack, const Eigen::MatrixXd& W,
                         const Eigen::VectorXd& z);

/// lb = y^T (Sy(Upsilon^T X_hat) - W) y, requiring Upsilon y = theta.
FmtBoundResult fmt_bound_affine(const CostMatrix& U, const Eigen::MatrixXd& upsilon,
                                const Eigen::VectorXd& y, const FmtSlack& slack,
                                const Eigen::MatrixXd& W, const Eigen::VectorXd& theta);

/// z* = W^{-1} X_hat^T theta.
Eigen::VectorXd optimal_z(const Eigen::MatrixXd& X_hat, const Eigen::MatrixXd& W,
                          const Eigen::VectorXd& theta);

inline constexpr double kSlackEpsilon = 1e-6;

/// Y = X^T U^{-1} X + eps I + S^T S with Gaussian X and S (scale `noise`);
/// feasible by construction.
FmtSlack random_feasible_slack(const CostMatrix& U, int d, int rho, std::uint64_t seed,
                               double noise = 0.3, double eps = kSlackEpsilon);

struct ProbeOptions {
  int rho = 0;  // 0 means rho = d
  int budget = 8;
  int ascent_iterations = 200;
  std::uint64_t seed = 0;
  double eps = kSlackEpsilon;
  double noise = 0.3;
  double warn_ratio = 0.99;
  double dominance_tol = 1e-8;
  BoundOptions bound;
};

struct ProbeResult {
  double best_fmt_lb = 0.0;
  double theorem1_lb = 0.0;
  double ratio = 0.0;
  bool warning = false;            // ratio < warn_ratio at termination
  bool dominance_violated = false; // ratio > 1 + dominance_tol
  int rho = 0;
};

/// Searches the feasible slack set for the largest free-matrix lower bound and
/// compares it against the plain lower bound of the same instance.
ProbeResult equivalence_probe(const PolyFamily& family, const Signal& x,
                              const CostMatrix& U, const ProbeOptions& options);

}  // namespace iikit
