#include "scrforge/polynomial.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace scrforge {

double EvaluatePolynomial(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (double c : coeffs) acc = acc * x + c;
  return acc;
}

std::vector<double> MultiplyPolynomials(std::span<const double> a,
                                        std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

namespace {

double EvaluateDerivative(std::span<const double> coeffs, double x) {
  const std::size_t n = coeffs.size() - 1;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc = acc * x + coeffs[k] * double(n - k);
  return acc;
}

double Polish(std::span<const double> coeffs, double x) {
  for (int it = 0; it < 8; ++it) {
    const double f = EvaluatePolynomial(coeffs, x);
    const double df = EvaluateDerivative(coeffs, x);
    if (f == 0.0 || df == 0.0 || !std::isfinite(df)) break;
    const double next = x - f / df;
    // Only accept steps that reduce the residual; a near-double root can
    // otherwise throw Newton far away.
    if (!(std::abs(EvaluatePolynomial(coeffs, next)) < std::abs(f))) break;
    x = next;
  }
  return x;
}

}  // namespace

std::vector<double> RealPolynomialRoots(std::span<const double> coeffs,
                                        double imag_tolerance) {
  std::size_t first = 0;
  while (first < coeffs.size() && coeffs[first] == 0.0) ++first;
  const std::span<const double> p = coeffs.subspan(first);
  if (p.size() < 2) return {};
  const int n = static_cast<int>(p.size()) - 1;

  std::vector<double> roots;
  if (n == 1) {
    roots.push_back(-p[1] / p[0]);
    return roots;
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) companion(0, k) = -p[k + 1] / p[0];
  for (int k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) return roots;
  for (int k = 0; k < n; ++k) {
    const std::complex<double> z = solver.eigenvalues()[k];
    if (!std::isfinite(z.real())) continue;
    if (std::abs(z.imag()) > imag_tolerance * std::max(1.0, std::abs(z))) {
      continue;
    }
    roots.push_back(Polish(p, z.real()));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace scrforge
