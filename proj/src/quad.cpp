#include "iikit/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "iikit/error.hpp"
#include "special.hpp"

namespace iikit {

namespace {

// Three-term recurrence of the monic orthogonal polynomials:
//   p_{k+1}(x) = (x - a_k) p_k(x) - b_k p_{k-1}(x),  mu0 = int w.
struct Recurrence {
  Eigen::VectorXd a;  // a_0 .. a_m
  Eigen::VectorXd b;  // b_0 (unused) .. b_m
  double mu0 = 0.0;
};

enum class RefKind { jacobi, laguerre, hermite };

Recurrence jacobi_recurrence(double alpha, double beta, int m) {
  Recurrence r{Eigen::VectorXd(m + 1), Eigen::VectorXd::Zero(m + 1), 0.0};
  const double s = alpha + beta;
  r.a(0) = (beta - alpha) / (s + 2.0);
  for (int k = 1; k <= m; ++k) {
    const double t = 2.0 * k + s;
    r.a(k) = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    if (k == 1) {
      r.b(1) = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
    } else {
      r.b(k) = 4.0 * k * (k + alpha) * (k + beta) * (k + s) / (t * t * (t + 1.0) * (t - 1.0));
    }
  }
  r.mu0 = std::exp2(s + 1.0) * detail::gamma_value(alpha + 1.0) * detail::gamma_value(beta + 1.0) /
          detail::gamma_value(s + 2.0);
  return r;
}

Recurrence laguerre_recurrence(double alpha, int m) {
  Recurrence r{Eigen::VectorXd(m + 1), Eigen::VectorXd::Zero(m + 1), 0.0};
  for (int k = 0; k <= m; ++k) {
    r.a(k) = 2.0 * k + alpha + 1.0;
    if (k >= 1) r.b(k) = k * (k + alpha);
  }
  r.mu0 = detail::gamma_value(alpha + 1.0);
  return r;
}

Recurrence hermite_recurrence(int m) {
  Recurrence r{Eigen::VectorXd::Zero(m + 1), Eigen::VectorXd::Zero(m + 1), 0.0};
  for (int k = 1; k <= m; ++k) r.b(k) = 0.5 * k;
  r.mu0 = std::sqrt(std::numbers::pi);
  return r;
}

// Orthonormal polynomial values q_0..q_{count-1} at x; returns q_count and
// its derivative through the out parameters.
void orthonormal_values(const Recurrence& r, int m, double x, double& sum_sq, double& qm,
                        double& dqm) {
  double q_prev = 0.0, q = 1.0 / std::sqrt(r.mu0);
  double dq_prev = 0.0, dq = 0.0;
  sum_sq = 0.0;
  for (int k = 0; k < m; ++k) {
    sum_sq += q * q;
    const double sb_next = std::sqrt(r.b(k + 1));
    const double sb = k > 0 ? std::sqrt(r.b(k)) : 0.0;
    const double q_next = ((x - r.a(k)) * q - sb * q_prev) / sb_next;
    const double dq_next = (q + (x - r.a(k)) * dq - sb * dq_prev) / sb_next;
    q_prev = q;
    q = q_next;
    dq_prev = dq;
    dq = dq_next;
  }
  qm = q;
  dqm = dq;
}

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix. Nodes get a
// Newton polish on the orthonormal recurrence; weights come from the
// Christoffel function 1 / sum q_k(x)^2, which keeps tiny tail weights
// accurate in the relative sense. Past m = 64 the Christoffel sums of the
// unbounded families can overflow, so eigenvector weights are used instead.
QuadRule golub_welsch(const Recurrence& r, int m) {
  Eigen::VectorXd diag = r.a.head(m);
  Eigen::VectorXd sub(std::max(m - 1, 0));
  for (int k = 1; k < m; ++k) sub(k - 1) = std::sqrt(r.b(k));

  const bool christoffel = m <= 64;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  if (m == 1) {
    QuadRule rule;
    rule.nodes = Eigen::VectorXd::Constant(1, r.a(0));
    rule.weights = Eigen::VectorXd::Constant(1, r.mu0);
    rule.exact_degree = 1;
    return rule;
  }
  eig.computeFromTridiagonal(diag, sub,
                             christoffel ? Eigen::EigenvaluesOnly : Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) {
    fail(ErrorCode::nonconvergence, "Golub-Welsch eigenvalue iteration failed");
  }

  QuadRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights.resize(m);
  rule.exact_degree = 2 * m - 1;
  for (int i = 0; i < m; ++i) {
    if (christoffel) {
      double x = rule.nodes(i);
      const double spacing =
          std::min(i > 0 ? x - rule.nodes(i - 1) : INFINITY, i + 1 < m ? rule.nodes(i + 1) - x : INFINITY);
      double sum_sq = 0.0, qm = 0.0, dqm = 0.0;
      for (int it = 0; it < 3; ++it) {
        orthonormal_values(r, m, x, sum_sq, qm, dqm);
        if (dqm == 0.0 || !std::isfinite(qm / dqm)) break;
        const double dx = qm / dqm;
        if (!(std::abs(dx) < 0.1 * spacing)) break;
        x -= dx;
        if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
      }
      orthonormal_values(r, m, x, sum_sq, qm, dqm);
      rule.nodes(i) = x;
      rule.weights(i) = 1.0 / sum_sq;
    } else {
      const double v0 = eig.eigenvectors()(0, i);
      rule.weights(i) = r.mu0 * v0 * v0;
    }
  }
  return rule;
}

// Reference rules are cached: the adaptive integrator asks for the same few
// (kind, alpha, beta, m) combinations over and over.
const QuadRule& reference_rule(RefKind kind, double alpha, double beta, int m) {
  using Key = std::tuple<int, double, double, int>;
  static std::mutex mutex;
  static std::map<Key, QuadRule> cache;
  const Key key{static_cast<int>(kind), alpha, beta, m};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Recurrence r;
  switch (kind) {
    case RefKind::jacobi: r = jacobi_recurrence(alpha, beta, m); break;
    case RefKind::laguerre: r = laguerre_recurrence(alpha, m); break;
    case RefKind::hermite: r = hermite_recurrence(m); break;
  }
  return cache.emplace(key, golub_welsch(r, m)).first->second;
}

// Jacobi rule for (b - t)^alpha (t - a)^beta on [a, b].
QuadRule mapped_jacobi_rule(double alpha, double beta, double a, double b, int m) {
  const QuadRule& ref = reference_rule(RefKind::jacobi, alpha, beta, m);
  const double half = 0.5 * (b - a);
  QuadRule rule = ref;
  rule.nodes = (ref.nodes.array() + 1.0) * half + a;
  rule.weights = ref.weights * std::pow(half, alpha + beta + 1.0);
  return rule;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Eigen::MatrixXd apply_rule(const MatrixFn& f, const QuadRule& rule, long& evals,
                           const std::function<double(double)>& extra = {}) {
  Eigen::MatrixXd acc;
  for (int k = 0; k < rule.size(); ++k) {
    const double t = rule.nodes(k);
    const double w = extra ? rule.weights(k) * extra(t) : rule.weights(k);
    if (k == 0) {
      acc = w * f(t);
    } else {
      acc.noalias() += w * f(t);
    }
    ++evals;
  }
  return acc;
}

// Sum over one panel [c, e] with an m-point rule. `left`/`right` say whether
// the panel touches the corresponding end of the original interval.
using PanelSum = std::function<Eigen::MatrixXd(double c, double e, bool left, bool right, int m,
                                               long& evals)>;

constexpr int kPanelOrder = 10;
constexpr int kMaxPanels = 20000;

struct Panel {
  double c, e;
  bool left, right;
  int depth;
  Eigen::MatrixXd value;
  double error;
};

// Globally adaptive bisection: the panel with the largest error estimate
// (|Q_2m - Q_m|) is split until the summed estimate drops below tol. A panel
// that would need more than `refinement_cap` bisections ends the search with
// a nonconvergence error.
IntegrateResult adaptive_panels(const PanelSum& panel_sum, double a, double b,
                                const IntegrateOptions& options) {
  IntegrateResult result;
  auto make_panel = [&](double c, double e, bool left, bool right, int depth) {
    Panel p{c, e, left, right, depth, {}, 0.0};
    const Eigen::MatrixXd coarse = panel_sum(c, e, left, right, kPanelOrder, result.evaluations);
    p.value = panel_sum(c, e, left, right, 2 * kPanelOrder, result.evaluations);
    p.error = max_abs(p.value - coarse);
    return p;
  };
  auto worse = [](const Panel& x, const Panel& y) {
    if (x.error != y.error) return x.error < y.error;
    return x.c > y.c;
  };
  std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> queue(worse);
  queue.push(make_panel(a, b, true, true, 0));
  double total_error = queue.top().error;
  std::vector<Panel> done;

  while (!queue.empty() && total_error > options.tol) {
    Panel top = queue.top();
    if (top.depth >= options.refinement_cap ||
        static_cast<int>(queue.size() + done.size()) >= kMaxPanels) {
      std::ostringstream os;
      os << "adaptive quadrature did not reach tol " << options.tol << " (estimate "
         << total_error << ") within " << options.refinement_cap << " refinements";
      fail(ErrorCode::nonconvergence, os.str());
    }
    queue.pop();
    const double mid = 0.5 * (top.c + top.e);
    Panel lo = make_panel(top.c, mid, top.left, false, top.depth + 1);
    Panel hi = make_panel(mid, top.e, false, top.right, top.depth + 1);
    total_error += lo.error + hi.error - top.error;
    queue.push(std::move(lo));
    queue.push(std::move(hi));
  }
  while (!queue.empty()) {
    done.push_back(queue.top());
    queue.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.c < y.c; });
  result.value = done.front().value;
  result.error_estimate = done.front().error;
  for (std::size_t i = 1; i < done.size(); ++i) {
    result.value += done[i].value;
    result.error_estimate += done[i].error;
  }
  return result;
}

// Legendre panel rule for an integrand that already includes any weight.
PanelSum plain_panels(const MatrixFn& g) {
  return [g](double c, double e, bool, bool, int m, long& evals) {
    return apply_rule(g, mapped_jacobi_rule(0.0, 0.0, c, e, m), evals);
  };
}

// Panels for (b - t)^alpha (t - a)^beta: end panels absorb the singular
// factor into a Gauss-Jacobi rule, everything else is multiplied in.
PanelSum jacobi_panels(const MatrixFn& f, double alpha, double beta, double a, double b) {
  return [=](double c, double e, bool left, bool right, int m, long& evals) {
    const double ra = right ? alpha : 0.0;
    const double lb = left ? beta : 0.0;
    const bool extra_a = !right && alpha != 0.0;
    const bool extra_b = !left && beta != 0.0;
    std::function<double(double)> extra;
    if (extra_a || extra_b) {
      extra = [=](double t) {
        double w = 1.0;
        if (extra_a) w *= std::pow(b - t, alpha);
        if (extra_b) w *= std::pow(t - a, beta);
        return w;
      };
    }
    return apply_rule(f, mapped_jacobi_rule(ra, lb, c, e, m), evals, extra);
  };
}

QuadRule infinite_rule(const WeightSpec& weight, int m) {
  if (weight.kind() == WeightSpec::Kind::laguerre) {
    return reference_rule(RefKind::laguerre, weight.alpha(), 0.0, m);
  }
  return reference_rule(RefKind::hermite, 0.0, 0.0, m);
}

// Maps an infinite domain onto (0, 1) or (-1, 1) so the panel integrator can
// handle weights without a Gauss rule (or integrands too rough for one).
IntegrateResult transformed_adaptive(const MatrixFn& f, const WeightSpec& weight,
                                     const IntegrateOptions& options) {
  if (weight.domain().kind() == Domain::Kind::half_line) {
    MatrixFn g = [&](double u) -> Eigen::MatrixXd {
      const double t = u / (1.0 - u);
      const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
      const double w = weight(t) * jac;
      if (w == 0.0 || !std::isfinite(t)) return 0.0 * f(0.0);
      return w * f(t);
    };
    return adaptive_panels(plain_panels(g), 0.0, 1.0, options);
  }
  MatrixFn g = [&](double u) -> Eigen::MatrixXd {
    const double den = 1.0 - u * u;
    const double t = u / den;
    const double jac = (1.0 + u * u) / (den * den);
    const double w = weight(t) * jac;
    if (w == 0.0 || !std::isfinite(t)) return 0.0 * f(0.0);
    return w * f(t);
  };
  return adaptive_panels(plain_panels(g), -1.0, 1.0, options);
}

}  // namespace

QuadRule gauss_rule(const WeightSpec& weight, int m) {
  if (m < 1) fail(ErrorCode::parameter, "Gauss rule needs m >= 1 points");
  switch (weight.kind()) {
    case WeightSpec::Kind::unit:
      return mapped_jacobi_rule(0.0, 0.0, weight.domain().a(), weight.domain().b(), m);
    case WeightSpec::Kind::jacobi:
      return mapped_jacobi_rule(weight.alpha(), weight.beta(), weight.domain().a(),
                                weight.domain().b(), m);
    case WeightSpec::Kind::laguerre:
    case WeightSpec::Kind::hermite:
      return infinite_rule(weight, m);
    case WeightSpec::Kind::custom:
      break;
  }
  fail(ErrorCode::unsupported_weight,
       "no Gauss rule for custom weights; use the adaptive integrator");
}

IntegrateResult integrate_detailed(const MatrixFn& f, const WeightSpec& weight,
                                   const IntegrateOptions& options) {
  if (!(options.tol > 0.0)) fail(ErrorCode::parameter, "quadrature tolerance must be positive");

  if (options.polynomial_degree && weight.has_gauss_rule()) {
    const int m = std::max(1, *options.polynomial_degree / 2 + 1);
    IntegrateResult r;
    r.value = apply_rule(f, gauss_rule(weight, m), r.evaluations);
    return r;
  }

  const Domain& dom = weight.domain();
  switch (weight.kind()) {
    case WeightSpec::Kind::unit:
      return adaptive_panels(plain_panels(f), dom.a(), dom.b(), options);
    case WeightSpec::Kind::jacobi:
      return adaptive_panels(jacobi_panels(f, weight.alpha(), weight.beta(), dom.a(), dom.b()),
                             dom.a(), dom.b(), options);
    case WeightSpec::Kind::custom:
      if (dom.is_finite()) {
        MatrixFn g = [&](double t) -> Eigen::MatrixXd { return weight(t) * f(t); };
        return adaptive_panels(plain_panels(g), dom.a(), dom.b(), options);
      }
      return transformed_adaptive(f, weight, options);
    case WeightSpec::Kind::laguerre:
    case WeightSpec::Kind::hermite:
      break;
  }

  // Built-in infinite weights: double the Gauss order while successive
  // estimates disagree; rough integrands fall back to the mapped panels.
  IntegrateResult r;
  Eigen::MatrixXd previous = apply_rule(f, infinite_rule(weight, 16), r.evaluations);
  for (int m = 32; m <= 128; m *= 2) {
    Eigen::MatrixXd current = apply_rule(f, infinite_rule(weight, m), r.evaluations);
    const double diff = max_abs(current - previous);
    previous = std::move(current);
    if (diff <= options.tol) {
      r.value = std::move(previous);
      r.error_estimate = diff;
      return r;
    }
  }
  IntegrateResult fallback = transformed_adaptive(f, weight, options);
  fallback.evaluations += r.evaluations;
  return fallback;
}

Eigen::MatrixXd integrate_interval(const MatrixFn& f, double a, double b,
                                   const IntegrateOptions& options) {
  if (a == b) return 0.0 * f(a);
  if (b < a) return -integrate_interval(f, b, a, options);
  return adaptive_panels(plain_panels(f), a, b, options).value;
}

Eigen::VectorXd repeated_integral(const VectorFn& f, int order, Side side, double a, double b,
                                  const IntegrateOptions& options) {
  if (order < 1) fail(ErrorCode::parameter, "repeated integral order must be >= 1");
  Domain::finite(a, b);

  // level 0 is f itself; level j integrates level j-1 from the fixed end to t.
  std::function<Eigen::VectorXd(int, double)> level = [&](int j, double t) -> Eigen::VectorXd {
    if (j == 0) return f(t);
    MatrixFn inner = [&, j](double s) -> Eigen::MatrixXd { return level(j - 1, s); };
    return side == Side::lower ? integrate_interval(inner, a, t, options)
                               : integrate_interval(inner, t, b, options);
  };
  MatrixFn outer = [&](double t) -> Eigen::MatrixXd { return level(order, t); };
  double factorial = 1.0;
  for (int i = 2; i <= order; ++i) factorial *= i;
  return factorial * integrate_interval(outer, a, b, options);
}

}  // namespace iikit
