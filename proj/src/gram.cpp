#include "iikit/gram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "iikit/error.hpp"
#include "iikit/quad.hpp"
#include "special.hpp"

namespace iikit {

GramianVerdict gramian_check(const Eigen::MatrixXd& gram, double pd_tol) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) {
    fail(ErrorCode::shape, "Gram matrix must be square and nonempty, got " +
                               std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()));
  }
  const Eigen::MatrixXd sym = 0.5 * (gram + gram.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  GramianVerdict v;
  v.min_eigenvalue = eig.eigenvalues().minCoeff();
  v.max_eigenvalue = eig.eigenvalues().maxCoeff();
  // Cholesky is the primary positive-definiteness test; the eigenvalues give
  // the relative margin.
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  v.independent = llt.info() == Eigen::Success && v.max_eigenvalue > 0.0 &&
                  v.min_eigenvalue > pd_tol * v.max_eigenvalue;
  return v;
}

std::optional<Eigen::MatrixXd> closed_form_gram(const PolyFamily& family) {
  const FamilyTag& tag = family.tag();
  const WeightSpec& w = family.weight();
  const int d = family.size();
  Eigen::VectorXd diag(d);
  switch (tag.kind) {
    case FamilyTag::Kind::legendre:
      if (w.kind() != WeightSpec::Kind::unit) return std::nullopt;
      for (int k = 0; k < d; ++k) diag(k) = family.domain().length() / (2.0 * k + 1.0);
      break;
    case FamilyTag::Kind::jacobi:
      if (w.kind() != WeightSpec::Kind::jacobi || w.alpha() != tag.alpha || w.beta() != tag.beta) {
        return std::nullopt;
      }
      for (int k = 0; k < d; ++k) {
        diag(k) = detail::jacobi_norm(k, tag.alpha, tag.beta, family.domain().length());
      }
      break;
    case FamilyTag::Kind::laguerre:
      if (w.kind() != WeightSpec::Kind::laguerre || w.alpha() != tag.alpha) return std::nullopt;
      for (int k = 0; k < d; ++k) diag(k) = detail::laguerre_norm(k, tag.alpha);
      break;
    case FamilyTag::Kind::hermite:
      if (w.kind() != WeightSpec::Kind::hermite) return std::nullopt;
      for (int k = 0; k < d; ++k) diag(k) = detail::hermite_norm(k);
      break;
    default:
      return std::nullopt;
  }
  return Eigen::MatrixXd(diag.asDiagonal());
}

Eigen::MatrixXd quadrature_gram(const PolyFamily& family) {
  const int d = family.size();
  MatrixFn outer = [&family, d](double t) -> Eigen::MatrixXd {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = family[i](t);
    return v * v.transpose();
  };
  IntegrateOptions opts;
  const int maxdeg = family.max_degree();
  Eigen::MatrixXd G;
  if (family.weight().has_gauss_rule()) {
    // ceil((2 maxdeg + 1) / 2) + 2 points: exact with two spare nodes.
    const int m = (2 * maxdeg + 2) / 2 + 2;
    const QuadRule rule = gauss_rule(family.weight(), m);
    G = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < rule.size(); ++k) G += rule.weights(k) * outer(rule.nodes(k));
  } else {
    G = integrate(outer, family.weight(), opts);
  }
  return 0.5 * (G + G.transpose());
}

GramPair make_gram_pair(const Eigen::MatrixXd& gram, double pd_tol) {
  const GramianVerdict verdict = gramian_check(gram, pd_tol);
  if (!verdict.independent) {
    std::ostringstream os;
    os << "Gramian criterion fails: kernels are linearly dependent (min eigenvalue "
       << verdict.min_eigenvalue << ", max " << verdict.max_eigenvalue << ")";
    fail(ErrorCode::singular_gram, os.str());
  }
  GramPair pair;
  pair.gram = 0.5 * (gram + gram.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(pair.gram);
  pair.inverse = llt.solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
  pair.inverse = 0.5 * (pair.inverse + pair.inverse.transpose());
  pair.min_eigenvalue = verdict.min_eigenvalue;
  pair.condition_number = verdict.max_eigenvalue / verdict.min_eigenvalue;
  pair.ill_conditioned = pair.condition_number > kIllConditioned;
  return pair;
}

GramPair gram_matrix(const PolyFamily& family, double pd_tol) {
  if (auto closed = closed_form_gram(family)) return make_gram_pair(*closed, pd_tol);
  return make_gram_pair(quadrature_gram(family), pd_tol);
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

Eigen::MatrixXd kron_lift(const Eigen::MatrixXd& A, int n) {
  if (n < 1) fail(ErrorCode::shape, "Kronecker lift needs n >= 1");
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(A.rows() * n, A.cols() * n);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (A(i, j) == 0.0) continue;
      for (int k = 0; k < n; ++k) K(i * n + k, j * n + k) = A(i, j);
    }
  }
  return K;
}

CompletionBound completion_bound(const Eigen::MatrixXd& C, const Eigen::MatrixXd& B,
                                 const Eigen::MatrixXd& M) {
  if (C.rows() != C.cols() || B.rows() != C.rows() || M.rows() != C.rows() ||
      M.cols() != B.cols()) {
    fail(ErrorCode::shape, "completion bound needs C (m x m), B and M (m x n)");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (C + C.transpose()));
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::not_positive_definite, "C is not positive definite");
  }
  CompletionBound out;
  const Eigen::MatrixXd MtB = M.transpose() * B;
  out.rhs = MtB + MtB.transpose() - M.transpose() * C * M;
  out.rhs = 0.5 * (out.rhs + out.rhs.transpose());
  const Eigen::MatrixXd full = B.transpose() * llt.solve(B);
  out.gap = full - out.rhs;
  out.gap = 0.5 * (out.gap + out.gap.transpose());
  return out;
}

}  // namespace iikit
