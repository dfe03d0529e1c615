#pragma once

#include <optional>

#include <Eigen/Dense>

#include "iikit/polyalg.hpp"

namespace iikit {

inline constexpr double kDefaultPdTol = 1e-12;
inline constexpr double kIllConditioned = 1e12;

/// Gram matrix F^{-1} = int w f f^T together with its inverse F.
struct GramPair {
  Eigen::MatrixXd gram;
  Eigen::MatrixXd inverse;
  double min_eigenvalue = 0.0;
  double condition_number = 1.0;
  /// Set when condition_number exceeds kIllConditioned. Informational only.
  bool ill_conditioned = false;
};

struct GramianVerdict {
  bool independent = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

/// Independent iff min eigenvalue > pd_tol * max eigenvalue.
GramianVerdict gramian_check(const Eigen::MatrixXd& gram, double pd_tol = kDefaultPdTol);

/// Diagonal Gram of a recognized classical family in closed form, or nullopt.
std::optional<Eigen::MatrixXd> closed_form_gram(const PolyFamily& family);

/// Gram by Gauss quadrature (or adaptive quadrature for custom weights).
Eigen::MatrixXd quadrature_gram(const PolyFamily& family);

/// Closed form when available, quadrature otherwise; validated and inverted.
/// Throws singular_gram when the kernels fail the Gramian criterion.
GramPair gram_matrix(const PolyFamily& family, double pd_tol = kDefaultPdTol);

/// Validates and inverts an already assembled Gram matrix.
GramPair make_gram_pair(const Eigen::MatrixXd& gram, double pd_tol = kDefaultPdTol);

/// A (x) B.
Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// A (x) I_n.
Eigen::MatrixXd kron_lift(const Eigen::MatrixXd& A, int n);

struct CompletionBound {
  Eigen::MatrixXd rhs;  // M^T B + B^T M - M^T C M
  Eigen::MatrixXd gap;  // B^T C^{-1} B - rhs, positive semidefinite
};

/// Completion of squares: B^T C^{-1} B >= M^T B + B^T M - M^T C M for C > 0,
/// with equality at M = C^{-1} B.
CompletionBound completion_bound(const Eigen::MatrixXd& C, const Eigen::MatrixXd& B,
                                 const Eigen::MatrixXd& M);

}  // namespace iikit
