#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "iikit/error.hpp"
#include "iikit/fmt_bound.hpp"
#include "oracles.hpp"

using namespace iikit;

namespace {

const Domain kUnit = Domain::finite(0, 1);

PolyFamily constant_family() { return PolyFamily({Polynomial{1.0}}, WeightSpec::unit(kUnit)); }

Signal ramp() { return Signal::polynomial(Eigen::MatrixXd((Eigen::MatrixXd(1, 2) << 0, 1).finished()), kUnit); }

FmtSlack scalar_slack(double x, double y) {
  return FmtSlack(1, {Eigen::MatrixXd::Constant(1, 1, x)}, Eigen::MatrixXd::Constant(1, 1, y));
}

double schur_min_eig(const Eigen::MatrixXd& U, const FmtSlack& s) {
  const Eigen::MatrixXd X = s.X();
  const Eigen::MatrixXd S = s.Y() - X.transpose() * U.inverse() * X;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("slack assembly") {
  std::vector<Eigen::MatrixXd> blocks = {Eigen::MatrixXd::Constant(2, 4, 1.0), Eigen::MatrixXd::Constant(2, 4, 2.0)};
  const FmtSlack s(2, blocks, Eigen::MatrixXd::Identity(8, 8));
  CHECK(s.d() == 2);
  CHECK(s.n() == 2);
  CHECK(s.X().rows() == 2);
  CHECK(s.X().cols() == 8);
  CHECK(s.X_hat().rows() == 4);
  CHECK(s.X_hat().cols() == 4);
  CHECK(s.X()(0, 5) == 2.0);
  CHECK(s.X_hat()(3, 0) == 2.0);
  CHECK_THROWS_AS(FmtSlack(2, blocks, Eigen::MatrixXd::Identity(16, 16)), Error);
  CHECK_THROWS_AS(FmtSlack(1, blocks, Eigen::MatrixXd::Identity(4, 4)), Error);
}

TEST_CASE("build_W") {
  const PolyFamily l2 = legendre_family(2, 0, 1);
  const int rho = 2, n = 1;
  const Eigen::MatrixXd W = build_W(Eigen::MatrixXd::Identity(6, 6), l2, rho, n);
  const double tr = 1 + 1.0 / 3 + 1.0 / 5;
  CHECK((W - tr * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(build_W(Eigen::MatrixXd::Zero(6, 6), l2, rho, n).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd Y = (Eigen::MatrixXd(1, 1) << 0.7).finished();
  CHECK(build_W(Y, constant_family(), 1, 1)(0, 0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_AS(build_W(Eigen::MatrixXd::Identity(5, 5), l2, rho, n), Error);
}

TEST_CASE("build_W agrees with direct quadrature of the integrand") {
  std::mt19937_64 rng(41);
  for (int d = 1; d <= 3; ++d) {
    for (int rho = 1; rho <= 3; ++rho) {
      for (int n = 1; n <= 3; ++n) {
        const PolyFamily fam = jacobi_family(d - 1, 1, 2, -1, 1);
        const int m = rho * d * n;
        const Eigen::MatrixXd A = oracle::random_matrix(rng, m, m);
        const Eigen::MatrixXd Y = A + A.transpose();
        const int w = rho * n;
        MatrixFn integrand = [&](double t) -> Eigen::MatrixXd {
          const Eigen::VectorXd f = eval_family(fam, t);
          const Eigen::MatrixXd Fk = kron(f, Eigen::MatrixXd::Identity(w, w));
          return Fk.transpose() * Y * Fk;
        };
        IntegrateOptions exact;
        exact.polynomial_degree = 2 * fam.max_degree();
        const Eigen::MatrixXd direct = integrate(integrand, fam.weight(), exact);
        const Eigen::MatrixXd W = build_W(Y, fam, rho, n);
        CHECK((W - direct).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
}

TEST_CASE("feasibility") {
  const CostMatrix I1 = CostMatrix::identity(1);
  const Feasibility f = feasibility_check(I1, scalar_slack(0, 1));
  CHECK(f.feasible);
  CHECK(f.margin == doctest::Approx(1.0));

  const Feasibility edge = feasibility_check(I1, scalar_slack(1, 1));
  CHECK_FALSE(edge.feasible);
  CHECK(std::abs(edge.margin) < 1e-15);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3, d = 1 + trial % 2, rho = 1 + (trial / 2) % 2;
    const CostMatrix U(oracle::random_spd(rng, n));
    std::vector<Eigen::MatrixXd> blocks;
    for (int i = 0; i < d; ++i) blocks.push_back(oracle::random_matrix(rng, n, rho * n, 2.0));
    const FmtSlack s(rho, blocks, Eigen::MatrixXd::Identity(rho * d * n, rho * d * n));
    // Schur-complement oracle.
    CHECK(feasibility_check(U, s).feasible == (schur_min_eig(U.matrix(), s) > 1e-12));
  }
}

TEST_CASE("fmt bound values") {
  const CostMatrix I1 = CostMatrix::identity(1);
  const FmtSlack s = scalar_slack(0.5, 1.0);
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 0.5);
  const Eigen::MatrixXd W = Eigen::MatrixXd::Constant(1, 1, 0.5);
  CHECK(fmt_bound(I1, theta, s, W, Eigen::VectorXd::Zero(1)).lb == 0.0);

  const Eigen::VectorXd z = optimal_z(s.X_hat(), W, theta);
  CHECK(z(0) == doctest::Approx(0.5));
  const FmtBoundResult r = fmt_bound(I1, theta, s, W, z);
  CHECK(r.lb == doctest::Approx(1.0 / 8));
  CHECK(r.feasible);
  CHECK(optimal_z(s.X_hat(), Eigen::MatrixXd::Identity(1, 1), theta)(0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(optimal_z(s.X_hat(), -W, theta), Error);
}

TEST_CASE("z-optimality and gradient at the optimum") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 3, d = 1 + trial % 3, rho = 1 + trial % 2;
    const CostMatrix U(oracle::random_spd(rng, n));
    const FmtSlack s = random_feasible_slack(U, d, rho, 100 + trial);
    const PolyFamily fam = legendre_family(d - 1, 0, 1);
    const Eigen::MatrixXd W = build_W(s.Y(), fam, rho, n);
    const Eigen::VectorXd theta = oracle::random_matrix(rng, d * n, 1);
    const Eigen::VectorXd zs = optimal_z(s.X_hat(), W, theta);
    const double best = fmt_bound(U, theta, s, W, zs).lb;
    const Eigen::VectorXd u = s.X_hat().transpose() * theta;
    CHECK(best == doctest::Approx(u.dot(W.llt().solve(u))).epsilon(1e-10));
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd z = zs + oracle::random_matrix(rng, rho * n, 1, 0.5);
      CHECK(fmt_bound(U, theta, s, W, z).lb <= best + 1e-10);
    }
    // Central differences of the quadratic vanish at z*.
    const double h = 1e-4;
    for (int i = 0; i < zs.size(); ++i) {
      Eigen::VectorXd zp = zs, zm = zs;
      zp(i) += h;
      zm(i) -= h;
      const double g = (fmt_bound(U, theta, s, W, zp).lb - fmt_bound(U, theta, s, W, zm).lb) / (2 * h);
      CHECK(std::abs(g) < 1e-10 * std::max(1.0, std::abs(best) / h));
    }
  }
}

TEST_CASE("affine form") {
  const CostMatrix I1 = CostMatrix::identity(1);
  const FmtSlack s = scalar_slack(0.5, 1.0);
  const Eigen::MatrixXd W = Eigen::MatrixXd::Constant(1, 1, 0.5);
  const Eigen::MatrixXd Ups = Eigen::MatrixXd::Identity(1, 1);
  CHECK(fmt_bound_affine(I1, Ups, Eigen::VectorXd::Zero(1), s, W, Eigen::VectorXd::Zero(1)).lb == 0.0);
  try {
    fmt_bound_affine(I1, Ups, Eigen::VectorXd::Ones(1), s, W, Eigen::VectorXd::Constant(1, 2.0));
    FAIL("expected consistency error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::consistency);
  }

  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2, d = 1 + trial % 3;
    const int rho = d;  // Upsilon is (dn) x (rho n); square when rho = d
    const CostMatrix U(oracle::random_spd(rng, n));
    const FmtSlack sl = random_feasible_slack(U, d, rho, 500 + trial);
    const Eigen::MatrixXd Wr = build_W(sl.Y(), legendre_family(d - 1, 0, 1), rho, n);
    const Eigen::VectorXd y = oracle::random_matrix(rng, rho * n, 1);
    const Eigen::MatrixXd Up = Eigen::MatrixXd::Identity(d * n, rho * n);
    const Eigen::VectorXd theta = Up * y;
    const double a = fmt_bound_affine(U, Up, y, sl, Wr, theta).lb;
    const double b = fmt_bound(U, theta, sl, Wr, y).lb;
    CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("random feasible slack is feasible") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3, d = 1 + trial % 4, rho = 1 + trial % 2;
    const CostMatrix U(oracle::random_spd(rng, n));
    const FmtSlack s = random_feasible_slack(U, d, rho, trial);
    CHECK(feasibility_check(U, s).feasible);
    CHECK(schur_min_eig(U.matrix(), s) >= kSlackEpsilon * 0.999);
  }
}

TEST_CASE("soundness and dominance over random slack draws") {
  std::mt19937_64 rng(2718);
  for (int inst = 0; inst < 6; ++inst) {
    const int n = 1 + inst % 2, d = 1 + inst % 3;
    const PolyFamily fam = legendre_family(d - 1, 0, 1);
    const Eigen::MatrixXd X = oracle::random_matrix(rng, n, 5);
    const CostMatrix U(oracle::random_spd(rng, n));
    const Signal x = Signal::polynomial(X, kUnit);
    const BoundReport t1 = lower_bound(fam, x, U);
    for (int k = 0; k < 20; ++k) {
      const int rho = 1 + k % 3;
      const FmtSlack s = random_feasible_slack(U, d, rho, 1000 * inst + k);
      const Eigen::MatrixXd W = build_W(s.Y(), fam, rho, n);
      const FmtBoundResult r = fmt_bound(U, t1.theta, s, W, optimal_z(s.X_hat(), W, t1.theta));
      CHECK(r.feasible);
      CHECK(r.lb <= t1.upper + 1e-9);
      CHECK(r.lb <= t1.lower + 1e-8);
    }
  }
}

TEST_CASE("equivalence probe") {
  ProbeOptions opts;
  opts.rho = 1;
  opts.seed = 5;
  const ProbeResult jensen = equivalence_probe(constant_family(), ramp(), CostMatrix::identity(1), opts);
  CHECK(jensen.theorem1_lb == doctest::Approx(0.25));
  CHECK(jensen.ratio >= 1 - 1e-6);
  CHECK_FALSE(jensen.dominance_violated);
  CHECK_FALSE(jensen.warning);

  // x in the span: theorem-1 bound equals the integral and nothing exceeds it.
  const Signal quad = Signal::polynomial((Eigen::MatrixXd(1, 3) << 1, -2, 3).finished(), kUnit);
  ProbeOptions o2;
  o2.seed = 9;
  o2.budget = 3;
  const ProbeResult span = equivalence_probe(legendre_family(2, 0, 1), quad, CostMatrix::identity(1), o2);
  CHECK(span.best_fmt_lb <= span.theorem1_lb + 1e-8);
  CHECK_FALSE(span.dominance_violated);

  // Deterministic under a fixed seed.
  const ProbeResult again = equivalence_probe(legendre_family(2, 0, 1), quad, CostMatrix::identity(1), o2);
  CHECK(again.best_fmt_lb == span.best_fmt_lb);
}
