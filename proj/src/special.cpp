#include "special.hpp"

#include <cmath>
#include <numbers>
#include <algorithm>

namespace iikit::detail {

namespace {

bool is_small_integer(double x) {
  return x >= 1.0 && x <= 21.0 && std::floor(x) == x;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// log Gamma for positive arguments, with the integer path kept exact.
double log_gamma(double x) {
  if (is_small_integer(x)) return std::log(factorial(static_cast<int>(x) - 1));
  return std::lgamma(x);
}

}  // namespace

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double pochhammer(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x + i;
  return r;
}

double gamma_value(double x) {
  if (is_small_integer(x)) return factorial(static_cast<int>(x) - 1);
  return std::tgamma(x);
}

double jacobi_norm(int k, double alpha, double beta, double len) {
  const double s = alpha + beta;
  // At k = 0, (a+b+1) G(a+b+1) = G(a+b+2) keeps a+b = -1 well defined.
  const double denom_gamma_arg = (k == 0) ? s + 2.0 : k + s + 1.0;
  const double denom_linear = (k == 0) ? 1.0 : 2.0 * k + s + 1.0;

  const double args[] = {k + alpha + 1.0, k + beta + 1.0, static_cast<double>(k + 1),
                         denom_gamma_arg};
  bool exact = true;
  for (double a : args) exact = exact && is_small_integer(a);
  double ratio = 0.0;
  if (exact) {
    ratio = gamma_value(args[0]) / gamma_value(args[2]) * gamma_value(args[1]) /
            gamma_value(args[3]);
  } else {
    ratio = std::exp(log_gamma(args[0]) + log_gamma(args[1]) - log_gamma(args[2]) -
                     log_gamma(args[3]));
  }
  return std::pow(len, s + 1.0) * ratio / denom_linear;
}

double laguerre_norm(int k, double alpha) {
  const double a = k + alpha + 1.0;
  if (is_small_integer(a)) return gamma_value(a) / factorial(k);
  return std::exp(log_gamma(a) - log_gamma(k + 1.0));
}

double hermite_norm(int k) {
  return std::ldexp(factorial(k), k) * std::sqrt(std::numbers::pi);
}

}  // namespace iikit::detail
