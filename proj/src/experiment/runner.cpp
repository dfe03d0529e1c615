#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "experiment.hpp"

namespace iikit::experiment {

namespace {

constexpr double kTiny = 1e-300;

double scale_of(double v) { return std::max(1.0, std::abs(v)); }

// Row assembly by column name; unset cells serialize as null.
class Table {
 public:
  Table(Kind kind, std::vector<std::string> specific) {
    columns_ = {"experiment", "row"};
    columns_.insert(columns_.end(), specific.begin(), specific.end());
    columns_.insert(columns_.end(), {"pass", "warning", "error"});
    kind_ = kind;
  }

  Row& add() {
    rows_.emplace_back();
    rows_.back().cells.assign(columns_.size(), std::monostate{});
    return rows_.back();
  }

  void put(Row& row, const std::string& column, Cell value) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i] == column) {
        row.cells[i] = std::move(value);
        return;
      }
    }
    throw std::logic_error("no column " + column);
  }

  void check(Row& row, const std::string& column, bool ok) const {
    put(row, column, ok);
    row.pass = row.pass && ok;
  }

  static void fail(Row& row, const std::exception& e) {
    row.pass = false;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
      row.error = std::string(iikit::to_string(err->code())) + ": " + err->what();
    } else {
      row.error = e.what();
    }
  }

  Report finish(const Config& config) {
    Report rep;
    rep.kind = kind_;
    rep.config = config.resolved;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      Row& r = rows_[i];
      put(r, "experiment", std::string(to_string(kind_)));
      put(r, "row", static_cast<long long>(i));
      put(r, "pass", r.pass);
      put(r, "warning", r.warning);
      if (!r.error.empty()) put(r, "error", r.error);
    }
    rep.columns = std::move(columns_);
    rep.rows = std::move(rows_);
    return rep;
  }

 private:
  Kind kind_;
  std::vector<std::string> columns_;
  std::vector<Row> rows_;
};

// Runs `body` for one row, converting module errors into a failed row and
// recording the elapsed time.
void timed(Row& row, const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    Table::fail(row, e);
  }
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Report run_bound(const Config& c) {
  Table t(c.kind, {"d", "n", "upper", "lower", "gap", "relative_gap", "residual_norm", "max_orthogonality_defect",
                   "condition_number", "check_sound", "check_gap_identity", "check_orthogonality"});
  Row& row = t.add();
  timed(row, [&] {
    const PolyFamily fam = c.family(c.kernel->count);
    const CostMatrix U(c.cost);
    t.put(row, "d", static_cast<long long>(fam.size()));
    t.put(row, "n", static_cast<long long>(c.signal->dim()));
    const BoundReport rep = lower_bound(fam, *c.signal, U, c.bound_options());
    const double scale = scale_of(rep.upper);
    const double defect = rep.orthogonality_defects.size() ? rep.orthogonality_defects.maxCoeff() : 0.0;
    t.put(row, "upper", rep.upper);
    t.put(row, "lower", rep.lower);
    t.put(row, "gap", rep.gap);
    t.put(row, "relative_gap", rep.relative_gap);
    t.put(row, "residual_norm", rep.residual_norm);
    t.put(row, "max_orthogonality_defect", defect);
    t.put(row, "condition_number", rep.gram.condition_number);
    t.check(row, "check_sound", rep.lower <= rep.upper + c.tol.sound * scale);
    // The gap equals the weighted residual energy of the least-squares fit.
    t.check(row, "check_gap_identity",
            std::abs(rep.gap - rep.residual_norm * rep.residual_norm) <= c.tol.gap_identity * scale);
    t.check(row, "check_orthogonality", defect <= c.tol.orthogonality * std::sqrt(scale));
  });
  return t.finish(c);
}

void sweep_rows(const Config& c, Table& t, bool converge) {
  const CostMatrix U(c.cost);
  const FamilyBuilder builder = [&](int count) { return c.family(count); };
  const int d_min = c.params.d_min;
  int d_max = c.params.d_max;
  std::optional<SweepError> failure;
  SweepResult res;
  try {
    res = hierarchy_sweep(builder, *c.signal, U, d_min, d_max, c.bound_options());
  } catch (const SweepError& e) {
    failure = e;
    d_max = e.level() - 1;
    if (d_max >= d_min) res = hierarchy_sweep(builder, *c.signal, U, d_min, d_max, c.bound_options());
  }
  const double first_gap = res.reports.empty() ? 0.0 : res.reports.front().gap;
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    const BoundReport& rep = res.reports[i];
    Row& row = t.add();
    t.put(row, "d", static_cast<long long>(res.levels[i]));
    t.put(row, "upper", rep.upper);
    t.put(row, "lower", rep.lower);
    t.put(row, "gap", rep.gap);
    t.put(row, "relative_gap", rep.relative_gap);
    t.check(row, "check_sound", rep.lower <= rep.upper + c.tol.sound * scale_of(rep.upper));
    const bool monotone =
        i == 0 || rep.lower >= res.reports[i - 1].lower - c.tol.monotone * scale_of(res.reports[i - 1].lower);
    t.check(row, "check_monotone", monotone);
    if (converge) {
      const double ratio = first_gap > kTiny ? rep.gap / first_gap : 0.0;
      t.put(row, "gap_ratio", ratio);
      if (i + 1 == res.reports.size() && !failure) t.check(row, "check_converged", ratio < c.tol.convergence);
    }
  }
  if (failure) {
    Row& row = t.add();
    t.put(row, "d", static_cast<long long>(failure->level()));
    Table::fail(row, *failure);
  }
}

Report run_sweep(const Config& c, bool converge) {
  std::vector<std::string> cols = {"d", "upper", "lower", "gap", "relative_gap", "check_sound", "check_monotone"};
  if (converge) cols.insert(cols.end(), {"gap_ratio", "check_converged"});
  Table t(c.kind, cols);
  try {
    sweep_rows(c, t, converge);
  } catch (const std::exception& e) {
    Row& row = t.add();
    Table::fail(row, e);
  }
  return t.finish(c);
}

Report run_invariance(const Config& c) {
  Table t(c.kind, {"sample", "condition", "lb", "lb_transformed", "relative_difference", "check_invariant"});
  std::optional<PolyFamily> fam;
  try {
    fam = c.family(c.kernel->count);
  } catch (const std::exception& e) {
    Table::fail(t.add(), e);
    return t.finish(c);
  }
  const CostMatrix U(c.cost);
  const int d = fam->size();
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  for (int s = 0; s < c.params.samples; ++s) {
    Row& row = t.add();
    t.put(row, "sample", static_cast<long long>(s));
    timed(row, [&] {
      Eigen::MatrixXd G(d, d);
      double cond = std::numeric_limits<double>::infinity();
      for (int attempt = 0; attempt < 1000 && !(cond <= c.params.condition_max); ++attempt) {
        for (int i = 0; i < d; ++i)
          for (int k = 0; k < d; ++k) G(i, k) = normal(rng);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
        const auto& sv = svd.singularValues();
        cond = sv(d - 1) > 0.0 ? sv(0) / sv(d - 1) : std::numeric_limits<double>::infinity();
      }
      if (!(cond <= c.params.condition_max))
        fail(ErrorCode::rank, "no transformation within the condition limit after 1000 draws");
      t.put(row, "condition", cond);
      const TransformedBound tb = transformed_bound(*fam, G, *c.signal, U, c.bound_options());
      const double rel = std::abs(tb.lb_transformed - tb.lb_original) / std::max(std::abs(tb.lb_original), kTiny);
      t.put(row, "lb", tb.lb_original);
      t.put(row, "lb_transformed", tb.lb_transformed);
      t.put(row, "relative_difference", rel);
      t.check(row, "check_invariant", rel <= c.tol.invariance);
    });
  }
  return t.finish(c);
}

Report run_cauchy(const Config& c) {
  Table t(c.kind, {"p", "side", "nested_norm", "weighted_norm", "discrepancy", "check_identity"});
  std::vector<std::pair<Side, std::string>> sides;
  if (c.params.side != "upper") sides.emplace_back(Side::lower, "lower");
  if (c.params.side != "lower") sides.emplace_back(Side::upper, "upper");
  for (const auto& [side, name] : sides) {
    Row& row = t.add();
    t.put(row, "p", static_cast<long long>(c.params.p));
    t.put(row, "side", name);
    timed(row, [&] {
      BoundOptions o = c.bound_options();
      const CauchyCheck chk = cauchy_identity_check(*c.signal, c.params.p, side, o);
      const double wn = chk.weighted_value.lpNorm<Eigen::Infinity>();
      t.put(row, "nested_norm", chk.nested_value.lpNorm<Eigen::Infinity>());
      t.put(row, "weighted_norm", wn);
      t.put(row, "discrepancy", chk.discrepancy);
      t.check(row, "check_identity", chk.discrepancy <= c.tol.cauchy * scale_of(wn));
    });
  }
  return t.finish(c);
}

Report run_fmt_probe(const Config& c) {
  Table t(c.kind, {"d", "rho", "budget", "best_fmt_lb", "theorem1_lb", "ratio", "draws", "max_sound_excess",
                   "max_dominance_excess", "check_dominance", "check_sound"});
  Row& row = t.add();
  timed(row, [&] {
    const PolyFamily fam = c.family(c.kernel->count);
    const CostMatrix U(c.cost);
    ProbeOptions o;
    o.rho = c.params.rho;
    o.budget = c.params.budget;
    o.ascent_iterations = c.params.iterations;
    o.seed = c.seed;
    o.eps = c.params.eps;
    o.noise = c.params.noise;
    o.warn_ratio = c.tol.warn_ratio;
    o.dominance_tol = c.tol.dominance;
    o.bound = c.bound_options();
    const ProbeResult pr = equivalence_probe(fam, *c.signal, U, o);
    t.put(row, "d", static_cast<long long>(fam.size()));
    t.put(row, "rho", static_cast<long long>(pr.rho));
    t.put(row, "budget", static_cast<long long>(o.budget));
    t.put(row, "best_fmt_lb", pr.best_fmt_lb);
    t.put(row, "theorem1_lb", pr.theorem1_lb);
    t.put(row, "ratio", pr.ratio);
    row.warning = pr.warning;

    // Independent feasible draws: every one must respect both bounds.
    const double upper = upper_bound(*c.signal, U, fam.weight(), o.bound);
    double sound_excess = pr.best_fmt_lb - upper;
    double dominance_excess = pr.best_fmt_lb - pr.theorem1_lb;
    if (c.params.draws > 0) {
      const Eigen::VectorXd theta = moment_vector(fam, *c.signal, o.bound);
      std::mt19937_64 seeds(c.seed ^ 0x9e3779b97f4a7c15ULL);
      for (int k = 0; k < c.params.draws; ++k) {
        const FmtSlack slack = random_feasible_slack(U, fam.size(), pr.rho, seeds(), o.noise, o.eps);
        const Eigen::MatrixXd W = build_W(slack.Y(), fam, pr.rho, U.dim());
        const Eigen::VectorXd z = optimal_z(slack.X_hat(), W, theta);
        const double lb = fmt_bound(U, theta, slack, W, z).lb;
        sound_excess = std::max(sound_excess, lb - upper);
        dominance_excess = std::max(dominance_excess, lb - pr.theorem1_lb);
      }
    }
    t.put(row, "draws", static_cast<long long>(c.params.draws));
    t.put(row, "max_sound_excess", sound_excess);
    t.put(row, "max_dominance_excess", dominance_excess);
    t.check(row, "check_dominance",
            !pr.dominance_violated && dominance_excess <= c.tol.dominance * scale_of(pr.theorem1_lb));
    t.check(row, "check_sound", sound_excess <= c.tol.sound * scale_of(upper));
  });
  return t.finish(c);
}

Report run_reduction(const Config& c) {
  Table t(c.kind, {"p", "degree", "lb_jacobi", "lb_reduced", "discrepancy", "check_reduction"});
  Row& row = t.add();
  t.put(row, "p", static_cast<long long>(c.params.p));
  t.put(row, "degree", static_cast<long long>(c.params.degree));
  timed(row, [&] {
    const CostMatrix U(c.cost);
    const ReductionCheck chk = weighted_moment_reduction(c.params.p, c.params.degree, c.domain->a(), c.domain->b(),
                                                         *c.signal, U, c.bound_options());
    t.put(row, "lb_jacobi", chk.lb_jacobi);
    t.put(row, "lb_reduced", chk.lb_reduced);
    t.put(row, "discrepancy", chk.discrepancy);
    t.check(row, "check_reduction", chk.discrepancy <= c.tol.reduction);
  });
  return t.finish(c);
}

}  // namespace

Report run(const Config& config) {
  switch (config.kind) {
    case Kind::bound: return run_bound(config);
    case Kind::sweep: return run_sweep(config, false);
    case Kind::converge: return run_sweep(config, true);
    case Kind::invariance: return run_invariance(config);
    case Kind::cauchy: return run_cauchy(config);
    case Kind::fmt_probe: return run_fmt_probe(config);
    case Kind::reduction: return run_reduction(config);
  }
  throw std::logic_error("unknown experiment kind");
}

}  // namespace iikit::experiment
