#include "iikit/polyalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "iikit/error.hpp"
#include "special.hpp"

namespace iikit {

namespace {

void check_dmax(int dmax) {
  if (dmax < 0) fail(ErrorCode::parameter, "dmax must be >= 0");
  if (dmax > kMaxDegree) {
    std::ostringstream os;
    os << "dmax = " << dmax << " exceeds the supported maximum degree " << kMaxDegree;
    fail(ErrorCode::parameter, os.str());
  }
}

// Expands sum_k c_k ((t - b) / (b - a))^k into monomial coefficients. The
// expansion cancels heavily away from the origin, so it runs in long double.
Polynomial compose_powers(const std::vector<double>& c, double a, double b) {
  const long double len = static_cast<long double>(b) - a;
  const long double s0 = -static_cast<long double>(b) / len;
  const long double s1 = 1.0L / len;
  std::vector<long double> result(c.size(), 0.0L);
  std::vector<long double> power(c.size(), 0.0L);
  power[0] = 1.0L;
  for (std::size_t k = 0; k < c.size(); ++k) {
    for (std::size_t i = 0; i <= k; ++i) result[i] += c[k] * power[i];
    if (k + 1 == c.size()) break;
    for (std::size_t i = k + 1; i > 0; --i) power[i] = power[i] * s0 + power[i - 1] * s1;
    power[0] *= s0;
  }
  return Polynomial(std::vector<double>(result.begin(), result.end()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

Polynomial Polynomial::monomial(int power) {
  std::vector<double> c(static_cast<std::size_t>(power) + 1, 0.0);
  c.back() = 1.0;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::shifted_power(double shift, int power) {
  Polynomial base({-shift, 1.0});
  Polynomial r = Polynomial::constant(1.0);
  for (int i = 0; i < power; ++i) r = r * base;
  return r;
}

void Polynomial::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

bool Polynomial::is_zero() const noexcept {
  return coeffs_.size() == 1 && coeffs_[0] == 0.0;
}

double Polynomial::operator()(double t) const noexcept {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() == 1) return Polynomial::constant(0.0);
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<double>(i);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
  std::vector<double> c(std::max(coeffs_.size(), rhs.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeff(static_cast<int>(i)) + rhs.coeff(static_cast<int>(i));
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
  std::vector<double> c(coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * rhs.coeffs_[j];
  }
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= s;
  return Polynomial(std::move(c));
}

// ---------------------------------------------------------------------------
// PolyFamily

PolyFamily::PolyFamily(std::vector<Polynomial> polys, WeightSpec weight, FamilyTag tag)
    : polys_(std::move(polys)), weight_(std::move(weight)), tag_(tag) {
  if (polys_.empty()) fail(ErrorCode::parameter, "kernel family must be nonempty");
}

int PolyFamily::max_degree() const noexcept {
  int m = 0;
  for (const auto& p : polys_) m = std::max(m, p.degree());
  return m;
}

Eigen::MatrixXd PolyFamily::coefficient_matrix(int cols) const {
  if (cols < 0) cols = max_degree() + 1;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(size(), cols);
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j <= polys_[i].degree() && j < cols; ++j) C(i, j) = polys_[i].coeff(j);
  }
  return C;
}

PolyFamily PolyFamily::prefix(int count) const {
  if (count < 1 || count > size()) {
    fail(ErrorCode::shape, "prefix length " + std::to_string(count) + " outside 1.." +
                               std::to_string(size()));
  }
  return PolyFamily(std::vector<Polynomial>(polys_.begin(), polys_.begin() + count), weight_, tag_);
}

PolyFamily PolyFamily::with_weight(const WeightSpec& weight) const {
  return PolyFamily(polys_, weight, {});
}

// ---------------------------------------------------------------------------
// Families

PolyFamily legendre_family(int dmax, double a, double b) {
  check_dmax(dmax);
  const Domain domain = Domain::finite(a, b);
  std::vector<Polynomial> polys;
  for (int d = 0; d <= dmax; ++d) {
    std::vector<double> c(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) c[k] = detail::binomial(d, k) * detail::binomial(d + k, k);
    polys.push_back(compose_powers(c, a, b));
  }
  return PolyFamily(std::move(polys), WeightSpec::unit(domain), {FamilyTag::Kind::legendre});
}

PolyFamily jacobi_family(int dmax, double alpha, double beta, double a, double b) {
  check_dmax(dmax);
  const Domain domain = Domain::finite(a, b);
  WeightSpec weight = WeightSpec::jacobi(alpha, beta, domain);
  std::vector<Polynomial> polys;
  for (int d = 0; d <= dmax; ++d) {
    // G(d+1+a) / (d! G(k+1+a)) * C(d,k) * G(d+k+1+a+b) / G(d+1+a+b), written
    // with rising factorials so that a + b = -1 needs no special casing.
    std::vector<double> c(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) {
      c[k] = detail::binomial(d, k) * detail::pochhammer(k + 1 + alpha, d - k) *
             detail::pochhammer(d + 1 + alpha + beta, k) / detail::gamma_value(d + 1.0);
    }
    polys.push_back(compose_powers(c, a, b));
  }
  return PolyFamily(std::move(polys), std::move(weight), {FamilyTag::Kind::jacobi, alpha, beta});
}

PolyFamily laguerre_family(int dmax, double alpha) {
  check_dmax(dmax);
  WeightSpec weight = WeightSpec::laguerre(alpha);
  std::vector<Polynomial> polys;
  for (int k = 0; k <= dmax; ++k) {
    std::vector<double> c(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) {
      const double binom = detail::pochhammer(alpha + i + 1, k - i) / detail::gamma_value(k - i + 1.0);
      c[i] = ((i % 2) ? -1.0 : 1.0) * binom / detail::gamma_value(i + 1.0);
    }
    polys.emplace_back(std::move(c));
  }
  return PolyFamily(std::move(polys), std::move(weight), {FamilyTag::Kind::laguerre, alpha});
}

PolyFamily hermite_family(int dmax) {
  check_dmax(dmax);
  std::vector<Polynomial> polys;
  const Polynomial two_t({0.0, 2.0});
  polys.push_back(Polynomial::constant(1.0));
  if (dmax >= 1) polys.push_back(two_t);
  for (int k = 1; k < dmax; ++k) {
    polys.push_back(two_t * polys[k] + polys[k - 1] * (-2.0 * k));
  }
  return PolyFamily(std::move(polys), WeightSpec::hermite(), {FamilyTag::Kind::hermite});
}

PolyFamily monomial_family(int dmax, const WeightSpec& weight) {
  check_dmax(dmax);
  std::vector<Polynomial> polys;
  for (int k = 0; k <= dmax; ++k) polys.push_back(Polynomial::monomial(k));
  return PolyFamily(std::move(polys), weight, {FamilyTag::Kind::monomial});
}

PolyFamily transform_family(const Eigen::MatrixXd& G, const PolyFamily& family) {
  if (G.cols() != family.size() || G.rows() < 1) {
    fail(ErrorCode::shape, "transform matrix must have " + std::to_string(family.size()) +
                               " columns");
  }
  std::vector<Polynomial> polys;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    Polynomial acc = Polynomial::constant(0.0);
    for (int j = 0; j < family.size(); ++j) acc = acc + family[j] * G(i, j);
    polys.push_back(std::move(acc));
  }
  return PolyFamily(std::move(polys), family.weight());
}

// ---------------------------------------------------------------------------
// Matrix relations between families

Eigen::MatrixXd basis_change(const PolyFamily& source, const PolyFamily& target) {
  const int cols = std::max(source.max_degree(), target.max_degree()) + 1;
  const Eigen::MatrixXd S = source.coefficient_matrix(cols);
  const Eigen::MatrixXd T = target.coefficient_matrix(cols);

  // G T = S  <=>  T^T G^T = S^T
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(T.transpose());
  qr.setThreshold(1e-12);
  if (qr.rank() < target.size()) {
    fail(ErrorCode::rank, "target family is linearly dependent (rank " +
                              std::to_string(qr.rank()) + " < " + std::to_string(target.size()) + ")");
  }
  const Eigen::MatrixXd Gt = qr.solve(S.transpose());
  const double residual = (T.transpose() * Gt - S.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if (!(residual <= 1e-8 * scale)) {
    std::ostringstream os;
    os << "source family is not contained in the span of the target (residual " << residual << ")";
    fail(ErrorCode::rank, os.str());
  }
  return Gt.transpose();
}

Eigen::MatrixXd weight_shift_matrix(int p, int dmax, double a, double b) {
  if (p < 1) fail(ErrorCode::parameter, "weight shift power p must be >= 1");
  check_dmax(dmax + p);
  const PolyFamily base = legendre_family(dmax, a, b);
  const PolyFamily target = legendre_family(dmax + p, a, b);
  const Polynomial factor = Polynomial::shifted_power(a, p);
  std::vector<Polynomial> shifted;
  for (const auto& l : base.polys()) shifted.push_back(factor * l);
  return basis_change(PolyFamily(std::move(shifted), target.weight()), target);
}

Eigen::MatrixXd diff_matrix(const PolyFamily& family, bool reduced) {
  const int d = family.size();
  const int dmax = d - 1;
  if (family.max_degree() != dmax) {
    fail(ErrorCode::rank, "family of " + std::to_string(d) + " polynomials must span degrees 0.." +
                              std::to_string(dmax) + " (max degree is " +
                              std::to_string(family.max_degree()) + ")");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(family.coefficient_matrix(d));
  lu.setThreshold(1e-12);
  if (lu.rank() < d) fail(ErrorCode::rank, "family does not span all degrees 0..dmax");

  std::vector<Polynomial> derivs;
  for (const auto& p : family.polys()) derivs.push_back(p.derivative());
  const PolyFamily derivative_family(std::move(derivs), family.weight());

  if (!reduced) return basis_change(derivative_family, family);
  if (d == 1) return Eigen::MatrixXd::Zero(1, 0);
  return basis_change(derivative_family, family.prefix(d - 1));
}

Eigen::VectorXd eval_family(const PolyFamily& family, double t) {
  if (!family.domain().contains(t)) {
    std::ostringstream os;
    os << "t = " << t << " is outside " << family.domain().describe();
    fail(ErrorCode::domain, os.str());
  }
  Eigen::VectorXd v(family.size());
  for (int i = 0; i < family.size(); ++i) v(i) = family[i](t);
  return v;
}

}  // namespace iikit
