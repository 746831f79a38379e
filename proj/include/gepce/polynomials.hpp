#pragma once

// Univariate orthonormal polynomial families (Jacobi and probabilists' Hermite)
// under their probability densities, with derivative evaluation, the Jacobi
// derivative identity constants, densities, and Gauss quadrature.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gepce {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Jacobi weight exponents for (1-x)^alpha (1+x)^beta; both must be >= -1/2.
class JacobiParams {
 public:
  JacobiParams(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  /// (alpha + 1, beta + 1): the family the derivatives belong to.
  JacobiParams shifted() const { return {alpha_ + 1.0, beta_ + 1.0}; }

  static JacobiParams legendre() { return {0.0, 0.0}; }
  static JacobiParams chebyshev() { return {-0.5, -0.5}; }

  friend bool operator==(const JacobiParams&, const JacobiParams&) = default;

 private:
  double alpha_;
  double beta_;
};

/// A probability measure on the real line used for sampling and weighting.
class Measure {
 public:
  enum class Kind { Jacobi, Gaussian };

  static Measure jacobi(JacobiParams p) { return Measure(Kind::Jacobi, p); }
  static Measure uniform() { return jacobi(JacobiParams::legendre()); }
  static Measure chebyshev() { return jacobi(JacobiParams::chebyshev()); }
  static Measure gaussian() { return Measure(Kind::Gaussian, JacobiParams::legendre()); }

  Kind kind() const { return kind_; }
  bool is_jacobi() const { return kind_ == Kind::Jacobi; }
  bool is_chebyshev() const { return is_jacobi() && params_ == JacobiParams::chebyshev(); }
  bool is_uniform() const { return is_jacobi() && params_ == JacobiParams::legendre(); }
  /// Only meaningful for Jacobi measures.
  const JacobiParams& params() const { return params_; }

  /// Short identifier: "chebyshev", "uniform", "gaussian" or "jacobi(a,b)".
  std::string name() const;
  static Measure parse(const std::string& name);

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  Measure(Kind k, JacobiParams p) : kind_(k), params_(p) {}
  Kind kind_;
  JacobiParams params_;
};

/// Normalising constant of the Beta density on [-1,1]:
/// Gamma(a+b+2) / (Gamma(a+1) Gamma(b+1) 2^(a+b+1)).
double jacobi_normalizer(const JacobiParams& p);

/// Probability density of the measure at x. Throws DomainError outside [-1,1]
/// for Jacobi measures. Returns +inf at an endpoint whose exponent is negative.
double density(const Measure& m, double x);

/// rho^(alpha,beta)(x) / rho_c(x), evaluated in closed form so it stays finite
/// at the endpoints for alpha, beta >= -1/2.
double chebyshev_density_ratio(const JacobiParams& p, double x);

struct PolyValue {
  double value;
  double derivative;
};

/// Orthonormal family with a tabulated three-term recurrence
///   sqrt(b_{n+1}) p_{n+1} = (x - a_n) p_n - sqrt(b_n) p_{n-1},  p_0 = 1.
class PolynomialFamily {
 public:
  enum class Kind { Jacobi, Hermite };

  static PolynomialFamily jacobi(JacobiParams p, int max_degree);
  static PolynomialFamily legendre(int max_degree) { return jacobi(JacobiParams::legendre(), max_degree); }
  static PolynomialFamily chebyshev(int max_degree) { return jacobi(JacobiParams::chebyshev(), max_degree); }
  static PolynomialFamily hermite(int max_degree);

  Kind kind() const { return kind_; }
  bool is_jacobi() const { return kind_ == Kind::Jacobi; }
  const JacobiParams& params() const { return params_; }
  int max_degree() const { return max_degree_; }

  /// The measure this family is orthonormal under.
  Measure measure() const;

  /// Same kind and parameters, tabulated to a different degree.
  PolynomialFamily with_degree(int max_degree) const;

  /// Diagonal recurrence coefficient a_n, n in [0, max_degree].
  double recurrence_a(int n) const { return a_.at(static_cast<std::size_t>(n)); }
  /// sqrt(b_n), n in [1, max_degree + 1].
  double recurrence_sqrt_b(int n) const { return sqrt_b_.at(static_cast<std::size_t>(n)); }

  /// p_n(x) and p_n'(x).
  PolyValue eval(int n, double x) const;

  /// p_0..p_{values.size()-1} at x, and their derivatives when `derivs` is
  /// non-empty (it must then match `values` in size).
  void eval_all(double x, std::span<double> values, std::span<double> derivs = {}) const;

 private:
  PolynomialFamily(Kind kind, JacobiParams params, int max_degree);
  double checked_point(double x) const;

  Kind kind_;
  JacobiParams params_;
  int max_degree_;
  std::vector<double> a_;       // size max_degree + 1
  std::vector<double> sqrt_b_;  // size max_degree + 2, sqrt_b_[0] unused
};

/// c(n, alpha, beta) in d/dx p_n^(a,b) = c p_{n-1}^(a+1,b+1):
///   c^2 = n (n+a+b+1) (a+b+2)(a+b+3) / (4 (a+1)(b+1)).
double derivative_constant(int n, const JacobiParams& p);
double derivative_constant_squared(int n, const JacobiParams& p);

/// Cross-checks derivative_constant_squared for degrees 1..max_degree against
/// E_{rho^(a+1,b+1)}[(p_n')^2] computed by Gauss quadrature. Throws
/// std::logic_error when any relative mismatch exceeds 1e-10.
void verify_derivative_constants(const JacobiParams& p, int max_degree);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// m-point Gauss rule for the family's probability density (Golub-Welsch).
/// Weights sum to one; exact for polynomials of degree <= 2m-1.
QuadratureRule gauss_quadrature(const PolynomialFamily& family, int m);

}  // namespace gepce
