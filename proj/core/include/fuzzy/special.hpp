#pragma once

namespace fuzzy::num {

/// Complete elliptic integral of the second kind E(m), m = k^2 in [0, 1],
/// by the arithmetic-geometric mean. E(0) = pi/2 and E(1) = 1 exactly.
double complete_elliptic_e(double m);

/// Gamma function for x > 0 (Lanczos approximation, g = 671/128).
double gamma_fn(double x);

/// Gauss hypergeometric 2F1(a, b; c; z) by direct series, |z| <= 0.9.
/// Throws ConvergenceError if the series has not settled within the term budget.
double hyp2f1(double a, double b, double c, double z);

}  // namespace fuzzy::num
