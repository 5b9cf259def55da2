#pragma once

namespace scdp {

// Natural log of |Gamma(x)|. Reentrant.
double ln_gamma(double x);

// Regularized upper incomplete gamma Gamma(a, x) / Gamma(a) for a > 0 and
// x >= 0. Series expansion below x < a + 1, Lentz continued fraction above.
// Throws DomainError outside the domain.
double gamma_q(double a, double x);

// Regularized lower incomplete gamma, 1 - gamma_q(a, x).
double gamma_p(double a, double x);

double erf(double x);

// ln C(n, k).
double ln_binomial(int n, int k);

}  // namespace scdp
