#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "experiment.hpp"
#include "iikit/error.hpp"

namespace iikit::experiment {

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string joined;
        for (const auto& v : violations) joined += (joined.empty() ? "" : "; ") + v;
        return joined;
      }()),
      violations_(std::move(violations)) {}

const char* to_string(Kind kind) {
  switch (kind) {
    case Kind::bound: return "bound";
    case Kind::sweep: return "sweep";
    case Kind::converge: return "converge";
    case Kind::invariance: return "invariance";
    case Kind::cauchy: return "cauchy";
    case Kind::fmt_probe: return "fmt-probe";
    case Kind::reduction: return "reduction";
  }
  return "?";
}

const std::vector<std::string>& tolerance_keys() {
  static const std::vector<std::string> keys = {
      "quad",     "pd",       "sound",     "monotone", "gap_identity", "orthogonality",
      "invariance", "cauchy", "reduction", "dominance", "warn_ratio", "convergence"};
  return keys;
}

namespace {

double* tolerance_slot(Tolerances& t, const std::string& key) {
  if (key == "quad") return &t.quad;
  if (key == "pd") return &t.pd;
  if (key == "sound") return &t.sound;
  if (key == "monotone") return &t.monotone;
  if (key == "gap_identity") return &t.gap_identity;
  if (key == "orthogonality") return &t.orthogonality;
  if (key == "invariance") return &t.invariance;
  if (key == "cauchy") return &t.cauchy;
  if (key == "reduction") return &t.reduction;
  if (key == "dominance") return &t.dominance;
  if (key == "warn_ratio") return &t.warn_ratio;
  if (key == "convergence") return &t.convergence;
  return nullptr;
}

std::string number_text(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Collects violations; accessors return defaults after recording a problem so
// that one pass reports as many issues as possible.
class Reader {
 public:
  void violation(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }
  bool ok() const { return errors_.empty(); }
  std::vector<std::string> take() { return std::move(errors_); }

  void unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        violation(path.empty() ? key : path + "." + key, "unknown field");
      }
    }
  }

  bool is_object(const json& obj, const std::string& path) {
    if (obj.is_object()) return true;
    violation(path, "must be an object");
    return false;
  }

  double number(const json& obj, const std::string& key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      violation(path + "." + key, "must be a number");
      return fallback;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) violation(path + "." + key, "must be finite");
    return d;
  }

  double required_number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) {
      violation(path + "." + key, "missing");
      return 0.0;
    }
    return number(obj, key, path, 0.0);
  }

  long long integer(const json& obj, const std::string& key, const std::string& path, long long fallback,
                    long long lo, long long hi) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      violation(path + "." + key, "must be an integer");
      return fallback;
    }
    const long long i = v.get<long long>();
    if (i < lo || i > hi) {
      violation(path + "." + key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "] (got " +
                                      std::to_string(i) + ")");
      return fallback;
    }
    return i;
  }

  std::string string(const json& obj, const std::string& key, const std::string& path,
                     const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      violation(path + "." + key, "must be a string");
      return fallback;
    }
    return v.get<std::string>();
  }

  bool boolean(const json& obj, const std::string& key, const std::string& path, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      violation(path + "." + key, "must be true or false");
      return fallback;
    }
    return v.get<bool>();
  }

  void exponent(double e, const std::string& path, const char* name) {
    if (!(e > -1.0)) violation(path, std::string("must satisfy ") + name + " > -1 (got " + number_text(e) + ")");
  }

 private:
  std::vector<std::string> errors_;
};

std::optional<Kind> parse_kind(const std::string& s) {
  for (Kind k : {Kind::bound, Kind::sweep, Kind::converge, Kind::invariance, Kind::cauchy, Kind::fmt_probe,
                 Kind::reduction}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

const char* family_name(KernelSpec::Family f) {
  switch (f) {
    case KernelSpec::Family::legendre: return "legendre";
    case KernelSpec::Family::jacobi: return "jacobi";
    case KernelSpec::Family::laguerre: return "laguerre";
    case KernelSpec::Family::hermite: return "hermite";
    case KernelSpec::Family::monomial: return "monomial";
  }
  return "?";
}

std::optional<KernelSpec::Family> parse_family(const std::string& s) {
  for (auto f : {KernelSpec::Family::legendre, KernelSpec::Family::jacobi, KernelSpec::Family::laguerre,
                 KernelSpec::Family::hermite, KernelSpec::Family::monomial}) {
    if (s == family_name(f)) return f;
  }
  return std::nullopt;
}

bool uses_kernel(Kind k) {
  return k == Kind::bound || k == Kind::sweep || k == Kind::converge || k == Kind::invariance ||
         k == Kind::fmt_probe;
}

std::optional<Domain> implied_domain(const std::string& kind) {
  if (kind == "laguerre") return Domain::half_line();
  if (kind == "hermite") return Domain::real_line();
  return std::nullopt;
}

json domain_json(const Domain& d) {
  switch (d.kind()) {
    case Domain::Kind::finite: return {{"kind", "finite"}, {"a", d.a()}, {"b", d.b()}};
    case Domain::Kind::half_line: return {{"kind", "half_line"}};
    case Domain::Kind::real_line: return {{"kind", "real_line"}};
  }
  return nullptr;
}

std::optional<Domain> read_domain(Reader& r, const json& doc, const std::string& weight_kind,
                                  const std::string& kernel_kind) {
  if (!doc.contains("domain")) {
    if (auto d = implied_domain(weight_kind)) return d;
    if (auto d = implied_domain(kernel_kind)) return d;
    r.violation("domain", "missing");
    return std::nullopt;
  }
  const json& j = doc.at("domain");
  if (j.is_array()) {
    if (j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
      r.violation("domain", "interval shorthand must be [a, b]");
      return std::nullopt;
    }
    const double a = j[0].get<double>(), b = j[1].get<double>();
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
      r.violation("domain", "finite domain needs a < b");
      return std::nullopt;
    }
    return Domain::finite(a, b);
  }
  if (!r.is_object(j, "domain")) return std::nullopt;
  r.unknown_keys(j, "domain", {"kind", "a", "b"});
  const std::string kind = r.string(j, "kind", "domain", "finite");
  if (kind == "half_line") return Domain::half_line();
  if (kind == "real_line") return Domain::real_line();
  if (kind != "finite") {
    r.violation("domain.kind", "must be finite, half_line or real_line (got \"" + kind + "\")");
    return std::nullopt;
  }
  const double a = r.required_number(j, "a", "domain");
  const double b = r.required_number(j, "b", "domain");
  if (!r.ok()) return std::nullopt;
  if (!(a < b)) {
    r.violation("domain", "finite domain needs a < b (got a = " + number_text(a) + ", b = " + number_text(b) + ")");
    return std::nullopt;
  }
  return Domain::finite(a, b);
}

// Weight of the given kind on `dom`, recording violations under `path`.
std::optional<WeightSpec> make_weight(Reader& r, const std::string& kind, double alpha, double beta,
                                      const Domain& dom, const std::string& path) {
  if (kind == "unit" || kind == "jacobi") {
    if (!dom.is_finite()) {
      r.violation(path + ".kind", kind + " weight needs a finite domain, got " + dom.describe());
      return std::nullopt;
    }
    if (kind == "unit") return WeightSpec::unit(dom);
    r.exponent(alpha, path + ".alpha", "alpha");
    r.exponent(beta, path + ".beta", "beta");
    if (!(alpha > -1.0) || !(beta > -1.0)) return std::nullopt;
    return WeightSpec::jacobi(alpha, beta, dom);
  }
  if (kind == "laguerre") {
    if (dom.kind() != Domain::Kind::half_line) {
      r.violation(path + ".kind", "laguerre weight lives on the half line, domain is " + dom.describe());
      return std::nullopt;
    }
    r.exponent(alpha, path + ".alpha", "alpha");
    if (!(alpha > -1.0)) return std::nullopt;
    return WeightSpec::laguerre(alpha);
  }
  if (kind == "hermite") {
    if (dom.kind() != Domain::Kind::real_line) {
      r.violation(path + ".kind", "hermite weight lives on the real line, domain is " + dom.describe());
      return std::nullopt;
    }
    return WeightSpec::hermite();
  }
  r.violation(path + ".kind", "must be unit, jacobi, laguerre or hermite (got \"" + kind + "\")");
  return std::nullopt;
}

struct SignalBuild {
  std::optional<Signal> signal;
  json canonical;
};

Eigen::MatrixXd derivative_rows(const Eigen::MatrixXd& c) {
  if (c.cols() == 1) return Eigen::MatrixXd::Zero(c.rows(), 1);
  Eigen::MatrixXd d(c.rows(), c.cols() - 1);
  for (Eigen::Index k = 1; k < c.cols(); ++k) d.col(k - 1) = c.col(k) * static_cast<double>(k);
  return d;
}

SignalBuild read_signal(Reader& r, const json& doc, const Domain& dom) {
  SignalBuild out;
  if (!doc.contains("signal")) {
    r.violation("signal", "missing");
    return out;
  }
  const json& j = doc.at("signal");
  if (!r.is_object(j, "signal")) return out;
  const bool derivative = r.boolean(j, "derivative", "signal", false);
  const bool decays = r.boolean(j, "decay_certificate", "signal", false);
  out.canonical = {{"derivative", derivative}, {"decay_certificate", decays}};

  if (j.contains("poly")) {
    r.unknown_keys(j, "signal", {"poly", "derivative", "decay_certificate"});
    json rows = j.at("poly");
    if (rows.is_array() && !rows.empty() && rows[0].is_number()) rows = json::array({rows});
    bool good = rows.is_array() && !rows.empty();
    std::size_t width = 0;
    if (good) {
      for (const json& row : rows) {
        if (!row.is_array() || row.empty() || (width && row.size() != width) ||
            !std::all_of(row.begin(), row.end(), [](const json& v) { return v.is_number(); })) {
          good = false;
          break;
        }
        width = row.size();
      }
    }
    if (!good) {
      r.violation("signal.poly", "must be a coefficient list or a list of equal-length coefficient lists");
      return out;
    }
    if (width > static_cast<std::size_t>(2 * kMaxDegree + 1)) {
      r.violation("signal.poly", "degree exceeds " + std::to_string(2 * kMaxDegree));
      return out;
    }
    Eigen::MatrixXd c(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = 0; k < width; ++k) c(i, k) = rows[i][k].get<double>();
    out.canonical["poly"] = rows;
    out.signal = Signal::polynomial(derivative ? derivative_rows(c) : c, dom);
    return out;
  }

  const std::string name = r.string(j, "preset", "signal", "");
  if (name.empty()) {
    r.violation("signal", "needs \"poly\" coefficients or a named \"preset\"");
    return out;
  }
  out.canonical["preset"] = name;
  const double scale = r.number(j, "scale", "signal", 1.0);
  out.canonical["scale"] = scale;

  if (name == "monomial") {
    r.unknown_keys(j, "signal", {"preset", "power", "scale", "derivative", "decay_certificate"});
    const int power = static_cast<int>(r.integer(j, "power", "signal", 1, 0, 2 * kMaxDegree));
    out.canonical["power"] = power;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, power + 1);
    c(0, power) = scale;
    out.signal = Signal::polynomial(derivative ? derivative_rows(c) : c, dom);
    return out;
  }

  VectorFn f;
  if (name == "exp") {
    r.unknown_keys(j, "signal", {"preset", "rate", "scale", "derivative", "decay_certificate"});
    const double rate = r.number(j, "rate", "signal", 1.0);
    out.canonical["rate"] = rate;
    const double s = derivative ? scale * rate : scale;
    f = [s, rate](double t) { return Eigen::VectorXd::Constant(1, s * std::exp(rate * t)); };
  } else if (name == "sin") {
    r.unknown_keys(j, "signal", {"preset", "freq", "phase", "scale", "derivative", "decay_certificate"});
    const double w = r.number(j, "freq", "signal", 1.0);
    const double ph = r.number(j, "phase", "signal", 0.0);
    out.canonical["freq"] = w;
    out.canonical["phase"] = ph;
    if (derivative) {
      f = [scale, w, ph](double t) { return Eigen::VectorXd::Constant(1, scale * w * std::cos(w * t + ph)); };
    } else {
      f = [scale, w, ph](double t) { return Eigen::VectorXd::Constant(1, scale * std::sin(w * t + ph)); };
    }
  } else if (name == "ramp") {
    r.unknown_keys(j, "signal", {"preset", "knot", "scale", "derivative", "decay_certificate"});
    const double knot = r.number(j, "knot", "signal", dom.is_finite() ? 0.5 * (dom.a() + dom.b()) : 0.0);
    out.canonical["knot"] = knot;
    if (derivative) {
      f = [scale, knot](double t) { return Eigen::VectorXd::Constant(1, t > knot ? scale : 0.0); };
    } else {
      f = [scale, knot](double t) { return Eigen::VectorXd::Constant(1, t > knot ? scale * (t - knot) : 0.0); };
    }
  } else {
    r.violation("signal.preset", "must be monomial, exp, sin or ramp (got \"" + name + "\")");
    return out;
  }
  if (!dom.is_finite() && !decays) {
    r.violation("signal.decay_certificate",
                "required for non-polynomial signals on " + dom.describe() + " (square integrability is the caller's claim)");
    return out;
  }
  if (!r.ok()) return out;
  out.signal = Signal::function(1, std::move(f), dom, decays || !dom.is_finite());
  return out;
}

std::optional<Eigen::MatrixXd> read_cost(Reader& r, const json& doc, int n) {
  if (!doc.contains("cost")) return Eigen::MatrixXd::Identity(n, n);
  const json& j = doc.at("cost");
  if (j.is_string()) {
    std::istringstream is(j.get<std::string>());
    std::string word;
    is >> word;
    if (word != "identity") {
      r.violation("cost", "string form must be \"identity\" or \"identity <n>\"");
      return std::nullopt;
    }
    int k = n;
    if (is >> k) {
      std::string rest;
      if (is >> rest) {
        r.violation("cost", "string form must be \"identity\" or \"identity <n>\"");
        return std::nullopt;
      }
    } else if (!is.eof()) {
      r.violation("cost", "identity size must be an integer");
      return std::nullopt;
    }
    if (k != n) {
      r.violation("cost", "identity " + std::to_string(k) + " does not match signal dimension " + std::to_string(n));
      return std::nullopt;
    }
    return Eigen::MatrixXd::Identity(n, n);
  }
  if (!j.is_array() || j.size() != static_cast<std::size_t>(n)) {
    r.violation("cost", "must be \"identity n\" or an n x n matrix with n = " + std::to_string(n));
    return std::nullopt;
  }
  Eigen::MatrixXd U(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
      r.violation("cost[" + std::to_string(i) + "]", "row must have " + std::to_string(n) + " entries");
      return std::nullopt;
    }
    for (int k = 0; k < n; ++k) {
      if (!row[k].is_number()) {
        r.violation("cost[" + std::to_string(i) + "][" + std::to_string(k) + "]", "must be a number");
        return std::nullopt;
      }
      U(i, k) = row[k].get<double>();
    }
  }
  try {
    CostMatrix check(U);
  } catch (const Error& e) {
    r.violation("cost", e.what());
    return std::nullopt;
  }
  return U;
}

json matrix_json(const Eigen::MatrixXd& M) {
  json out = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    out.push_back(row);
  }
  return out;
}

}  // namespace

PolyFamily Config::family(int count) const {
  const KernelSpec& k = *kernel;
  const int dmax = count - 1;
  PolyFamily fam = [&] {
    switch (k.family) {
      case KernelSpec::Family::legendre: return legendre_family(dmax, domain->a(), domain->b());
      case KernelSpec::Family::jacobi: return jacobi_family(dmax, k.alpha, k.beta, domain->a(), domain->b());
      case KernelSpec::Family::laguerre: return laguerre_family(dmax, k.alpha);
      case KernelSpec::Family::hermite: return hermite_family(dmax);
      case KernelSpec::Family::monomial: break;
    }
    return monomial_family(dmax, weight ? *weight : WeightSpec::unit(*domain));
  }();
  if (weight && !fam.weight().same_as(*weight)) return fam.with_weight(*weight);
  return fam;
}

BoundOptions Config::bound_options() const {
  BoundOptions o;
  o.quad.tol = tol.quad;
  o.pd_tol = tol.pd;
  o.monotone_tol = tol.monotone;
  return o;
}

Config reparse(const json& doc) {
  Reader r;
  if (!doc.is_object()) throw ConfigError({"<document>: must be an object"});
  if (!doc.contains("experiment")) throw ConfigError({"experiment: missing"});
  r.unknown_keys(doc, "", {"experiment", "preset", "description", "domain", "weight", "kernel", "signal", "cost",
                           "tolerances", "seed", "params", "output"});

  Config c;
  json& out = c.resolved;
  const std::string exp = r.string(doc, "experiment", "", "");
  const auto kind = parse_kind(exp);
  if (!kind) {
    r.violation("experiment", "unknown experiment \"" + exp +
                                  "\" (expected bound, sweep, converge, invariance, cauchy, fmt-probe or reduction)");
    throw ConfigError(r.take());
  }
  c.kind = *kind;
  out["experiment"] = exp;
  if (doc.contains("preset")) out["preset"] = doc.at("preset");
  if (doc.contains("description")) {
    if (!doc.at("description").is_string()) r.violation("description", "must be a string");
    else out["description"] = doc.at("description");
  }

  // Weight and kernel kinds first: they can imply the domain.
  const json weight_j = doc.value("weight", json());
  const json kernel_j = doc.value("kernel", json());
  std::string weight_kind, kernel_kind;
  if (!weight_j.is_null() && r.is_object(weight_j, "weight")) weight_kind = r.string(weight_j, "kind", "weight", "");
  if (!kernel_j.is_null() && r.is_object(kernel_j, "kernel")) kernel_kind = r.string(kernel_j, "kind", "kernel", "");

  c.domain = read_domain(r, doc, weight_kind, kernel_kind);
  if (c.domain) out["domain"] = domain_json(*c.domain);

  if (!weight_j.is_null() && weight_j.is_object() && c.domain) {
    r.unknown_keys(weight_j, "weight", {"kind", "alpha", "beta"});
    if (weight_kind.empty()) r.violation("weight.kind", "missing");
    const double alpha = r.number(weight_j, "alpha", "weight", 0.0);
    const double beta = r.number(weight_j, "beta", "weight", 0.0);
    if (!weight_kind.empty()) {
      c.weight = make_weight(r, weight_kind, alpha, beta, *c.domain, "weight");
      json w = {{"kind", weight_kind}};
      if (weight_kind == "jacobi" || weight_kind == "laguerre") w["alpha"] = alpha;
      if (weight_kind == "jacobi") w["beta"] = beta;
      out["weight"] = w;
    }
  }

  if (uses_kernel(c.kind) || c.kind == Kind::reduction) {
    if (kernel_j.is_null()) {
      if (c.kind != Kind::reduction) r.violation("kernel", "missing");
    } else if (kernel_j.is_object()) {
      r.unknown_keys(kernel_j, "kernel", {"kind", "d", "alpha", "beta"});
      KernelSpec k;
      const auto fam = parse_family(kernel_kind);
      if (!fam) {
        r.violation("kernel.kind", kernel_kind.empty() ? "missing"
                                                       : "must be legendre, jacobi, laguerre, hermite or monomial (got \"" +
                                                             kernel_kind + "\")");
      } else {
        k.family = *fam;
      }
      if (!kernel_j.contains("d")) r.violation("kernel.d", "missing");
      k.count = static_cast<int>(r.integer(kernel_j, "d", "kernel", 1, 1, kMaxDegree + 1));
      k.alpha = r.number(kernel_j, "alpha", "kernel", 0.0);
      k.beta = r.number(kernel_j, "beta", "kernel", 0.0);
      if (fam == KernelSpec::Family::jacobi || fam == KernelSpec::Family::laguerre)
        r.exponent(k.alpha, "kernel.alpha", "alpha");
      if (fam == KernelSpec::Family::jacobi) r.exponent(k.beta, "kernel.beta", "beta");
      if (fam && c.domain) {
        const bool finite = c.domain->is_finite();
        if ((k.family == KernelSpec::Family::legendre || k.family == KernelSpec::Family::jacobi) && !finite)
          r.violation("kernel.kind", std::string(family_name(k.family)) + " kernels need a finite domain");
        if (k.family == KernelSpec::Family::laguerre && c.domain->kind() != Domain::Kind::half_line)
          r.violation("kernel.kind", "laguerre kernels live on the half line");
        if (k.family == KernelSpec::Family::hermite && c.domain->kind() != Domain::Kind::real_line)
          r.violation("kernel.kind", "hermite kernels live on the real line");
        if (k.family == KernelSpec::Family::monomial && !finite && !c.weight)
          r.violation("weight", "monomial kernels on " + c.domain->describe() + " need an explicit weight");
      }
      json kj = {{"kind", kernel_kind}, {"d", k.count}};
      if (fam == KernelSpec::Family::jacobi || fam == KernelSpec::Family::laguerre) kj["alpha"] = k.alpha;
      if (fam == KernelSpec::Family::jacobi) kj["beta"] = k.beta;
      out["kernel"] = kj;
      c.kernel = k;
    }
  }

  if (c.domain) {
    SignalBuild s = read_signal(r, doc, *c.domain);
    c.signal = std::move(s.signal);
    out["signal"] = s.canonical;
  } else if (!doc.contains("signal")) {
    r.violation("signal", "missing");
  }

  const int n = c.signal ? c.signal->dim() : 1;
  if (auto U = read_cost(r, doc, n)) {
    c.cost = *U;
    out["cost"] = matrix_json(c.cost);
  }

  // Tolerances.
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (r.is_object(t, "tolerances")) {
      for (const auto& [key, value] : t.items()) {
        double* slot = tolerance_slot(c.tol, key);
        if (!slot) {
          r.violation("tolerances." + key, "unknown tolerance");
          continue;
        }
        *slot = r.number(t, key, "tolerances", *slot);
        if (!(*slot > 0.0)) r.violation("tolerances." + key, "must be positive");
      }
    }
  }
  if (c.tol.warn_ratio > 1.0) r.violation("tolerances.warn_ratio", "must not exceed 1");
  json tj = json::object();
  for (const auto& key : tolerance_keys()) tj[key] = *tolerance_slot(c.tol, key);
  out["tolerances"] = tj;

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0)) {
      r.violation("seed", "must be a non-negative integer");
    } else {
      c.seed = s.get<std::uint64_t>();
    }
  }
  out["seed"] = c.seed;

  // Per-experiment parameters.
  json pj = json::object();
  const json params = doc.value("params", json::object());
  if (r.is_object(params, "params")) {
    Params& p = c.params;
    const int cap = kMaxDegree + 1;
    switch (c.kind) {
      case Kind::bound:
        r.unknown_keys(params, "params", {});
        break;
      case Kind::sweep:
      case Kind::converge: {
        r.unknown_keys(params, "params", {"d_min", "d_max"});
        const int kd = c.kernel ? c.kernel->count : 1;
        p.d_min = static_cast<int>(r.integer(params, "d_min", "params", c.kind == Kind::converge ? 2 : 1, 1, cap));
        p.d_max = static_cast<int>(r.integer(params, "d_max", "params", kd, 1, cap));
        if (p.d_min > p.d_max) r.violation("params", "d_min must not exceed d_max");
        pj = {{"d_min", p.d_min}, {"d_max", p.d_max}};
        break;
      }
      case Kind::invariance:
        r.unknown_keys(params, "params", {"samples", "condition_max"});
        p.samples = static_cast<int>(r.integer(params, "samples", "params", 200, 1, 100000));
        p.condition_max = r.number(params, "condition_max", "params", 1e6);
        if (!(p.condition_max >= 1.0)) r.violation("params.condition_max", "must be >= 1");
        pj = {{"samples", p.samples}, {"condition_max", p.condition_max}};
        break;
      case Kind::cauchy:
        r.unknown_keys(params, "params", {"p", "side"});
        p.p = static_cast<int>(r.integer(params, "p", "params", 1, 1, 8));
        p.side = r.string(params, "side", "params", "both");
        if (p.side != "lower" && p.side != "upper" && p.side != "both")
          r.violation("params.side", "must be lower, upper or both");
        if (c.domain && !c.domain->is_finite()) r.violation("domain", "cauchy experiments need a finite domain");
        pj = {{"p", p.p}, {"side", p.side}};
        break;
      case Kind::fmt_probe:
        r.unknown_keys(params, "params", {"rho", "budget", "iterations", "noise", "eps", "draws"});
        p.rho = static_cast<int>(r.integer(params, "rho", "params", 0, 0, 16));
        p.budget = static_cast<int>(r.integer(params, "budget", "params", 8, 1, 10000));
        p.iterations = static_cast<int>(r.integer(params, "iterations", "params", 200, 0, 100000));
        p.noise = r.number(params, "noise", "params", 0.3);
        p.eps = r.number(params, "eps", "params", kSlackEpsilon);
        p.draws = static_cast<int>(r.integer(params, "draws", "params", 0, 0, 1000000));
        if (!(p.noise >= 0.0)) r.violation("params.noise", "must be >= 0");
        if (!(p.eps > 0.0)) r.violation("params.eps", "must be positive");
        pj = {{"rho", p.rho}, {"budget", p.budget}, {"iterations", p.iterations},
              {"noise", p.noise}, {"eps", p.eps},     {"draws", p.draws}};
        break;
      case Kind::reduction:
        r.unknown_keys(params, "params", {"p", "degree"});
        p.p = static_cast<int>(r.integer(params, "p", "params", 1, 1, 6));
        p.degree = static_cast<int>(
            r.integer(params, "degree", "params", c.kernel ? c.kernel->count - 1 : 0, 0, kMaxDegree - p.p));
        if (c.domain && !c.domain->is_finite()) r.violation("domain", "reduction experiments need a finite domain");
        pj = {{"p", p.p}, {"degree", p.degree}};
        break;
    }
  }
  out["params"] = pj;

  // Output.
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (r.is_object(o, "output")) {
      r.unknown_keys(o, "output", {"path", "format"});
      c.output_path = r.string(o, "path", "output", "");
      c.output_format = r.string(o, "format", "output", "json");
      if (c.output_format != "json" && c.output_format != "csv") r.violation("output.format", "must be json or csv");
    }
  }
  json oj = {{"format", c.output_format}};
  if (!c.output_path.empty()) oj["path"] = c.output_path;
  out["output"] = oj;

  // Everything referenced must be constructible.
  if (r.ok() && c.kernel && c.domain) {
    try {
      const int top = (c.kind == Kind::sweep || c.kind == Kind::converge) ? c.params.d_max : c.kernel->count;
      const PolyFamily fam = c.family(top);
      if (c.signal && !(fam.domain() == c.signal->domain())) r.violation("kernel", "domain mismatch with signal");
    } catch (const Error& e) {
      r.violation("kernel", e.what());
    }
  }
  if (!r.ok()) throw ConfigError(r.take());
  return c;
}

Config parse_config(const std::string& text) {
  json doc;
  if (std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); })) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError({std::string("<document>: ") + e.what()});
    }
  }
  if (!doc.is_object()) throw ConfigError({"<document>: must be an object"});
  if (doc.contains("preset")) {
    const json& name = doc.at("preset");
    if (!name.is_string()) throw ConfigError({"preset: must be a string"});
    const Preset* p = find_preset(name.get<std::string>());
    if (!p) throw ConfigError({"preset: unknown preset \"" + name.get<std::string>() + "\" (see `ii-kit presets`)"});
    json base = p->config;
    json patch = doc;
    patch.erase("preset");
    base.merge_patch(patch);
    base["preset"] = p->name;
    doc = std::move(base);
  }
  return reparse(doc);
}

Config with_seed(const Config& config, std::uint64_t seed) {
  json doc = config.resolved;
  doc["seed"] = seed;
  return reparse(doc);
}

Config with_tolerance(const Config& config, const std::string& key, double value) {
  Tolerances probe;
  if (!tolerance_slot(probe, key)) throw ConfigError({"tolerances." + key + ": unknown tolerance"});
  json doc = config.resolved;
  doc["tolerances"][key] = value;
  return reparse(doc);
}

}  // namespace iikit::experiment
