#pragma once

// Test-only reference computations. Nothing here calls into the library's
// recurrence tables or Gauss rules, so it can arbitrate their results.

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// Beta density on [-1,1] with exponents (alpha, beta), computed from lgamma.
inline double jacobi_density(double alpha, double beta, double x) {
  const double lognorm = std::lgamma(alpha + beta + 2.0) - std::lgamma(alpha + 1.0) -
                         std::lgamma(beta + 1.0) - (alpha + beta + 1.0) * std::log(2.0);
  return std::exp(lognorm) * std::pow(1.0 - x, alpha) * std::pow(1.0 + x, beta);
}

/// \int_{-1}^{1} f(x) rho^(alpha,beta)(x) dx by tanh-sinh. The two-argument
/// form supplies the distance to the nearest endpoint, so the weight is
/// evaluated without cancellation next to a singularity.
inline double integrate_jacobi(const std::function<double(double)>& f, double alpha, double beta) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double lognorm = std::lgamma(alpha + beta + 2.0) - std::lgamma(alpha + 1.0) -
                         std::lgamma(beta + 1.0) - (alpha + beta + 1.0) * std::log(2.0);
  const double norm = std::exp(lognorm);
  auto g = [&](double x, double xc) {
    const double one_minus = xc > 0.0 ? xc : 1.0 - x;
    const double one_plus = xc < 0.0 ? -xc : 1.0 + x;
    if (one_minus <= 0.0 || one_plus <= 0.0) return 0.0;
    return f(x) * norm * std::pow(one_minus, alpha) * std::pow(one_plus, beta);
  };
  return integrator.integrate(g, -1.0, 1.0, 1e-15);
}

/// \int f(x) N(0,1)(x) dx over the real line.
inline double integrate_gaussian(const std::function<double(double)>& f) {
  boost::math::quadrature::sinh_sinh<double> integrator;
  auto g = [&](double x) { return f(x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
  return integrator.integrate(g, 1e-14);
}

/// Orthonormal Legendre via Bonnet's recurrence on the classical P_n.
inline double legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return 1.0;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return std::sqrt(2.0 * n + 1.0) * p1;
}

/// Orthonormal Chebyshev (first kind) under the arcsine density.
inline double chebyshev(int n, double x) {
  return n == 0 ? 1.0 : std::sqrt(2.0) * std::cos(n * std::acos(x));
}

/// Orthonormal probabilists' Hermite, He_n / sqrt(n!).
inline double hermite(int n, double x) {
  double h0 = 1.0;
  double h1 = x;
  if (n == 0) return 1.0;
  for (int k = 1; k < n; ++k) {
    const double h2 = x * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1 / std::sqrt(std::tgamma(n + 1.0));
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracle
