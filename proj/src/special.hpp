#pragma once

// Internal special-function helpers shared by the family builders and the
// closed-form Gram shortcut.

namespace iikit::detail {

double binomial(int n, int k);

/// Rising factorial x (x + 1) ... (x + k - 1); 1 for k = 0.
double pochhammer(double x, int k);

/// Gamma(x) for x > 0. Integer arguments up to 21 use exact factorials.
double gamma_value(double x);

/// Closed-form squared norm of the degree-k shifted Jacobi polynomial on an
/// interval of length `len`:
///   len^{a+b+1} G(k+a+1) G(k+b+1) / (k! (2k+a+b+1) G(k+a+b+1))
double jacobi_norm(int k, double alpha, double beta, double len);

/// G(k + alpha + 1) / k!
double laguerre_norm(int k, double alpha);

/// 2^k k! sqrt(pi)
double hermite_norm(int k);

}  // namespace iikit::detail
