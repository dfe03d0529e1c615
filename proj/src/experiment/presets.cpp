#include "experiment.hpp"

namespace iikit::experiment {

namespace {

// Each preset is a bound experiment reproducing one row of the table of known
// inequalities as a special case of the general bound. Jacobi weights are
// written (b - t)^alpha (t - a)^beta, so (t - a)^p is jacobi(0, p).
json finite(double a, double b) { return {{"kind", "finite"}, {"a", a}, {"b", b}}; }

json jacobi_weight(double alpha, double beta) { return {{"kind", "jacobi"}, {"alpha", alpha}, {"beta", beta}}; }

json jacobi_kernel(int d, double alpha, double beta) {
  return {{"kind", "jacobi"}, {"d", d}, {"alpha", alpha}, {"beta", beta}};
}

json bound(json domain, json weight, json kernel, json signal) {
  json c = {{"experiment", "bound"}, {"domain", std::move(domain)}, {"kernel", std::move(kernel)},
            {"signal", std::move(signal)}, {"cost", "identity 1"}};
  if (!weight.is_null()) c["weight"] = std::move(weight);
  return c;
}

const json kSin = {{"preset", "sin"}, {"freq", 3.0}};
const json kSinDot = {{"preset", "sin"}, {"freq", 3.0}, {"derivative", true}};
const json kExp = {{"preset", "exp"}, {"rate", 1.0}};

std::vector<Preset> build() {
  std::vector<Preset> out;
  auto add = [&](std::string name, std::string description, json config) {
    out.push_back({std::move(name), std::move(description), std::move(config)});
  };
  add("jensen", "Jensen: f = [1], unit weight on [0, 1], x = t",
      bound(finite(0, 1), nullptr, {{"kind", "legendre"}, {"d", 1}}, {{"poly", {0.0, 1.0}}}));
  add("seuret-gouaisbaut", "Bessel-Legendre: unit weight, Legendre kernel of degree 2",
      bound(finite(0, 1), nullptr, {{"kind", "legendre"}, {"d", 3}}, kSin));
  add("seuret-gouaisbaut-derivative", "Bessel-Legendre applied to the derivative signal",
      bound(finite(0, 1), nullptr, {{"kind", "legendre"}, {"d", 3}}, kSinDot));
  add("feng-nguang-orthogonal", "orthogonal-polynomial form: Jacobi weight with monomial kernel",
      bound(finite(0, 1), jacobi_weight(1, 1), {{"kind", "monomial"}, {"d", 3}}, kExp));
  add("feng-nguang", "unit weight with monomial kernel [1, t, t^2]",
      bound(finite(0, 1), nullptr, {{"kind", "monomial"}, {"d", 3}}, kExp));
  add("park-lee-lee", "Wirtinger-based: unit weight, kernel [1; p_1]",
      bound(finite(0, 1), nullptr, {{"kind", "legendre"}, {"d", 2}}, kSin));
  add("gyurkovics-takacs", "weight (t - a)^p with kernel j^{0,p}, p = 2",
      bound(finite(0, 1), jacobi_weight(0, 2), jacobi_kernel(3, 0, 2), kSin));
  add("gyurkovics-takacs-derivative", "weight (t - a)^p with kernel j^{0,p} on the derivative, p = 2",
      bound(finite(0, 1), jacobi_weight(0, 2), jacobi_kernel(3, 0, 2), kSinDot));
  add("chen-xu-lower", "weight (t - a)^{m-1} with kernel j^{0,m-1}, m = 3",
      bound(finite(0, 1), jacobi_weight(0, 2), jacobi_kernel(3, 0, 2), kExp));
  add("chen-xu-upper", "weight (b - t)^{m-1} with kernel j^{m-1,0}, m = 3",
      bound(finite(0, 1), jacobi_weight(2, 0), jacobi_kernel(3, 2, 0), kExp));
  add("li-huang-yan-a", "weight (b - t)^m with kernel j^{0,m} (mismatched pair), m = 1",
      bound(finite(0, 1), jacobi_weight(1, 0), jacobi_kernel(3, 0, 1), kSin));
  add("li-huang-yan-b", "weight (t - a)^m with kernel j^{m,0} (mismatched pair), m = 1",
      bound(finite(0, 1), jacobi_weight(0, 1), jacobi_kernel(3, 1, 0), kSin));
  add("park-kwon-ryu", "weight (t - a)^k with kernel j^{k,0}, k = 1",
      bound(finite(0, 1), jacobi_weight(0, 1), jacobi_kernel(3, 1, 0), kExp));
  add("liu-fridman", "half line, Laguerre weight e^{-t}, kernel [1; t]",
      bound({{"kind", "half_line"}}, {{"kind", "laguerre"}, {"alpha", 0.0}}, {{"kind", "monomial"}, {"d", 2}},
            {{"preset", "exp"}, {"rate", -1.0}, {"decay_certificate", true}}));
  add("huang-he", "delay interval [-h, 0], Jacobi weight and matching kernel, derivative signal",
      bound(finite(-1, 0), jacobi_weight(2, 1), jacobi_kernel(3, 2, 1), kSinDot));
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace iikit::experiment
