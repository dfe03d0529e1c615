#pragma once

#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "iikit/domain.hpp"
#include "iikit/weight.hpp"

namespace iikit {

/// Highest polynomial degree accepted by the family builders. The monomial
/// representation loses too much accuracy beyond this.
inline constexpr int kMaxDegree = 12;

/// Real polynomial in the monomial basis: coeffs[i] multiplies t^i.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs)
      : Polynomial(std::vector<double>(coeffs)) {}

  static Polynomial constant(double c) { return Polynomial({c}); }
  static Polynomial monomial(int power);
  /// (t - shift)^power
  static Polynomial shifted_power(double shift, int power);

  /// Degree of the highest nonzero coefficient; 0 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept;
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double coeff(int i) const noexcept {
    return i < static_cast<int>(coeffs_.size()) ? coeffs_[i] : 0.0;
  }

  /// Horner evaluation.
  double operator()(double t) const noexcept;
  Polynomial derivative() const;

  Polynomial operator+(const Polynomial& rhs) const;
  Polynomial operator*(const Polynomial& rhs) const;
  Polynomial operator*(double s) const;

 private:
  void trim();

  std::vector<double> coeffs_;
};

/// Which closed-form family (if any) produced a PolyFamily. Used by the Gram
/// assembly to take the diagonal shortcut; cleared by any transformation.
struct FamilyTag {
  enum class Kind { none, monomial, legendre, jacobi, laguerre, hermite };
  Kind kind = Kind::none;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Ordered kernel family f(t) = [f_1(t), ..., f_d(t)] with its weight.
class PolyFamily {
 public:
  PolyFamily(std::vector<Polynomial> polys, WeightSpec weight,
             FamilyTag tag = {});

  int size() const noexcept { return static_cast<int>(polys_.size()); }
  const std::vector<Polynomial>& polys() const noexcept { return polys_; }
  const Polynomial& operator[](int i) const { return polys_.at(i); }
  const WeightSpec& weight() const noexcept { return weight_; }
  const Domain& domain() const noexcept { return weight_.domain(); }
  const FamilyTag& tag() const noexcept { return tag_; }
  int max_degree() const noexcept;

  /// Row i holds the monomial coefficients of f_i; `cols` pads with zeros
  /// (defaults to max_degree() + 1).
  Eigen::MatrixXd coefficient_matrix(int cols = -1) const;

  /// First `count` members, keeping the weight and tag.
  PolyFamily prefix(int count) const;

  /// Same polynomials paired with another weight (tag dropped).
  PolyFamily with_weight(const WeightSpec& weight) const;

 private:
  std::vector<Polynomial> polys_;
  WeightSpec weight_;
  FamilyTag tag_;
};

/// Shifted Legendre polynomials l_0..l_dmax on [a, b], unit weight.
PolyFamily legendre_family(int dmax, double a, double b);

/// Shifted Jacobi polynomials j_0..j_dmax on [a, b], orthogonal against
/// (b - t)^alpha (t - a)^beta.
PolyFamily jacobi_family(int dmax, double alpha, double beta, double a, double b);

/// Generalized Laguerre polynomials on [0, inf), weight t^alpha e^{-t}.
PolyFamily laguerre_family(int dmax, double alpha);

/// Physicists' Hermite polynomials on the real line, weight e^{-t^2}.
PolyFamily hermite_family(int dmax);

/// 1, t, ..., t^dmax paired with `weight`.
PolyFamily monomial_family(int dmax, const WeightSpec& weight);

/// phi(t) = G f(t). The result carries no classical tag.
PolyFamily transform_family(const Eigen::MatrixXd& G, const PolyFamily& family);

/// Matrix G with source(t) = G * target(t) for all t. Throws rank errors when
/// some source polynomial is outside span(target) or target is dependent.
Eigen::MatrixXd basis_change(const PolyFamily& source, const PolyFamily& target);

/// P with (t - a)^p l_dmax(t) = P l_{dmax+p}(t) on [a, b];
/// shape (dmax+1) x (dmax+p+1).
Eigen::MatrixXd weight_shift_matrix(int p, int dmax, double a, double b);

/// Differentiation matrix of a family spanning degrees 0..dmax.
/// Full: f'(t) = L f(t), (dmax+1) x (dmax+1).
/// Reduced: f'(t) = L f_{0..dmax-1}(t), (dmax+1) x dmax.
Eigen::MatrixXd diff_matrix(const PolyFamily& family, bool reduced);

/// [f_i(t)]; domain error if t lies outside the family's domain.
Eigen::VectorXd eval_family(const PolyFamily& family, double t);

}  // namespace iikit
