#pragma once

// Independent reference values for the tests. Nothing here calls into the
// library's quadrature or Gram code: moments come from Beta/Gamma closed forms.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <quadmath.h>

#include "iikit/polyalg.hpp"

namespace oracle {

// Moment sums are ill-conditioned (Hankel matrices), so the oracle works in
// binary128.
using Q = __float128;
using QMat = std::vector<std::vector<Q>>;

inline QMat zeros(std::size_t r, std::size_t c) { return QMat(r, std::vector<Q>(c, 0)); }

inline QMat to_q(const Eigen::MatrixXd& M) {
  QMat out = zeros(M.rows(), M.cols());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out[i][j] = M(i, j);
  return out;
}

inline QMat mul(const QMat& A, const QMat& B) {
  QMat C = zeros(A.size(), B.empty() ? 0 : B[0].size());
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t k = 0; k < B.size(); ++k)
      for (std::size_t j = 0; j < C[i].size(); ++j) C[i][j] += A[i][k] * B[k][j];
  return C;
}

inline QMat transpose(const QMat& A) {
  QMat T = zeros(A.empty() ? 0 : A[0].size(), A.size());
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[i].size(); ++j) T[j][i] = A[i][j];
  return T;
}

// Solves G S = M for symmetric positive definite G (Cholesky).
inline QMat spd_solve(QMat G, QMat M) {
  const std::size_t n = G.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) G[j][j] -= G[j][k] * G[j][k];
    G[j][j] = sqrtq(G[j][j]);
    for (std::size_t i = j + 1; i < n; ++i) {
      for (std::size_t k = 0; k < j; ++k) G[i][j] -= G[i][k] * G[j][k];
      G[i][j] /= G[j][j];
    }
  }
  for (std::size_t c = 0; c < (M.empty() ? 0 : M[0].size()); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < i; ++k) M[i][c] -= G[i][k] * M[k][c];
      M[i][c] /= G[i][i];
    }
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t k = i + 1; k < n; ++k) M[i][c] -= G[k][i] * M[k][c];
      M[i][c] /= G[i][i];
    }
  }
  return M;
}

// Moments are taken about a base point c (the left endpoint on finite
// domains, 0 otherwise) so that every moment is a single Beta/Gamma value.
inline Q base_point(const iikit::WeightSpec& w) {
  return w.domain().is_finite() ? static_cast<Q>(w.domain().a()) : 0;
}

// int w(t) (t - c)^k dt.
inline Q weight_moment(const iikit::WeightSpec& w, int k) {
  using K = iikit::WeightSpec::Kind;
  switch (w.kind()) {
    case K::unit:
    case K::jacobi: {
      const Q al = w.alpha(), be = w.beta(), len = w.domain().length();
      return powq(len, al + be + k + 1) * expq(lgammaq(al + 1) + lgammaq(be + k + 1) - lgammaq(al + be + k + 2));
    }
    case K::laguerre:
      return expq(lgammaq(static_cast<Q>(w.alpha()) + k + 1));
    case K::hermite:
      return k % 2 == 1 ? Q(0) : expq(lgammaq((k + 1) / Q(2)));
    default:
      return nanq("");
  }
}

// Coefficients of p(t) re-expanded in powers of (t - c): row-wise Taylor shift.
inline QMat shift_rows(QMat C, Q c) {
  for (auto& row : C) {
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(row.size());
    for (std::ptrdiff_t i = 0; i < m; ++i)
      for (std::ptrdiff_t k = m - 2; k >= i; --k) row[k] += c * row[k + 1];
  }
  return C;
}

inline QMat hankel(const iikit::WeightSpec& w, int rows, int cols) {
  QMat H = zeros(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) H[i][j] = weight_moment(w, i + j);
  return H;
}

inline QMat family_coeffs(const iikit::PolyFamily& fam, const iikit::WeightSpec& w) {
  return shift_rows(to_q(fam.coefficient_matrix()), base_point(w));
}

inline Eigen::MatrixXd to_double(const QMat& M) {
  Eigen::MatrixXd out(M.size(), M.empty() ? 0 : M[0].size());
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = 0; j < M[i].size(); ++j) out(i, j) = static_cast<double>(M[i][j]);
  return out;
}

inline QMat gram_q(const iikit::PolyFamily& fam, const iikit::WeightSpec& w) {
  const QMat C = family_coeffs(fam, w);
  const int m = static_cast<int>(C[0].size());
  return mul(mul(C, hankel(w, m, m)), transpose(C));
}

// int w f f^T.
inline Eigen::MatrixXd gram(const iikit::PolyFamily& fam) { return to_double(gram_q(fam, fam.weight())); }

// int w x^T U x for a polynomial signal given as an n x (deg+1) coefficient
// matrix.
inline double upper(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U, const iikit::WeightSpec& w) {
  const QMat Xq = shift_rows(to_q(X), base_point(w));
  const QMat M = mul(mul(transpose(Xq), to_q(U)), Xq);
  const QMat H = hankel(w, X.cols(), X.cols());
  Q s = 0;
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = 0; j < M.size(); ++j) s += M[i][j] * H[i][j];
  return static_cast<double>(s);
}

// d x n matrix of moments int w f_i x_j.
inline QMat moments(const iikit::PolyFamily& fam, const Eigen::MatrixXd& X, const iikit::WeightSpec& w) {
  const QMat C = family_coeffs(fam, w);
  const QMat Xq = shift_rows(to_q(X), base_point(w));
  return mul(mul(C, hankel(w, C[0].size(), X.cols())), transpose(Xq));
}

inline Eigen::VectorXd theta(const iikit::PolyFamily& fam, const Eigen::MatrixXd& X,
                             const iikit::WeightSpec& w) {
  const Eigen::MatrixXd M = to_double(moments(fam, X, w));
  Eigen::VectorXd out(M.size());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out(i * M.cols() + j) = M(i, j);
  return out;
}

// theta^T (F (x) U) theta with the Gram solved in binary128.
inline double lower(const iikit::PolyFamily& fam, const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
                    const iikit::WeightSpec& w) {
  const QMat M = moments(fam, X, w);
  const QMat S = spd_solve(gram_q(fam, w), M);
  const QMat N = mul(transpose(M), S);
  Q s = 0;
  for (Eigen::Index i = 0; i < U.rows(); ++i)
    for (Eigen::Index j = 0; j < U.cols(); ++j) s += N[i][j] * U(i, j);
  return static_cast<double>(s);
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  Eigen::MatrixXd M(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) M(i, j) = N(rng);
  return M;
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
  const Eigen::MatrixXd A = random_matrix(rng, n, n);
  return A * A.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace oracle
