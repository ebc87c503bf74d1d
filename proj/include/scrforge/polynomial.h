#pragma once

#include <span>
#include <vector>

namespace scrforge {

// Real roots of sum_k coeffs[k] * x^(n-k) (highest degree first), from the
// eigenvalues of the companion matrix. Roots whose imaginary part is small
// relative to their magnitude are kept and polished with Newton steps on the
// original polynomial. Leading zeros are dropped; returns roots in ascending
// order.
std::vector<double> RealPolynomialRoots(std::span<const double> coeffs,
                                        double imag_tolerance = 1e-8);

// Horner evaluation, highest degree first.
double EvaluatePolynomial(std::span<const double> coeffs, double x);

// Product of two polynomials, highest degree first.
std::vector<double> MultiplyPolynomials(std::span<const double> a,
                                        std::span<const double> b);

}  // namespace scrforge
