// Univariate polynomials with real coefficients, lowest degree first.
#pragma once

#include <vector>

namespace tcpkit::poly {

using Poly = std::vector<double>;

Poly multiply(const Poly& a, const Poly& b);
Poly add(const Poly& a, const Poly& b);
Poly scale(const Poly& a, double t);
Poly derivative(const Poly& a);
double eval(const Poly& a, double t);
double max_abs_coeff(const Poly& a);

/// True when every coefficient is negligible against `reference`.
bool is_zero(const Poly& a, double reference);

/// Real roots in [lo, hi], sorted and deduplicated, Newton-polished.
/// Near-double roots (small imaginary parts) are reported as real.
std::vector<double> real_roots(const Poly& a, double lo, double hi);

}  // namespace tcpkit::poly
