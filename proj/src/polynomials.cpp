#include "gepce/polynomials.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace gepce {

namespace {

constexpr double kEndpointSlack = 1e-14;

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

JacobiParams::JacobiParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha >= -0.5) || !(beta >= -0.5)) {
    throw std::invalid_argument("JacobiParams: alpha and beta must be >= -1/2 (got " +
                                format_real(alpha) + ", " + format_real(beta) + ")");
  }
}

std::string Measure::name() const {
  if (kind_ == Kind::Gaussian) return "gaussian";
  if (is_chebyshev()) return "chebyshev";
  if (is_uniform()) return "uniform";
  return "jacobi(" + format_real(params_.alpha()) + "," + format_real(params_.beta()) + ")";
}

Measure Measure::parse(const std::string& name) {
  if (name == "gaussian" || name == "normal") return gaussian();
  if (name == "chebyshev" || name == "arcsine") return chebyshev();
  if (name == "uniform") return uniform();
  double a = 0.0;
  double b = 0.0;
  if (std::sscanf(name.c_str(), "jacobi(%lf,%lf)", &a, &b) == 2) return jacobi({a, b});
  throw std::invalid_argument("unknown measure '" + name + "'");
}

double jacobi_normalizer(const JacobiParams& p) {
  const double a = p.alpha();
  const double b = p.beta();
  return std::exp(std::lgamma(a + b + 2.0) - std::lgamma(a + 1.0) - std::lgamma(b + 1.0) -
                  (a + b + 1.0) * std::numbers::ln2);
}

double density(const Measure& m, double x) {
  if (m.kind() == Measure::Kind::Gaussian) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  }
  if (!(std::abs(x) <= 1.0)) throw DomainError("density: x outside [-1,1]");
  const auto& p = m.params();
  return jacobi_normalizer(p) * std::pow(1.0 - x, p.alpha()) * std::pow(1.0 + x, p.beta());
}

double chebyshev_density_ratio(const JacobiParams& p, double x) {
  if (!(std::abs(x) <= 1.0)) throw DomainError("chebyshev_density_ratio: x outside [-1,1]");
  return std::numbers::pi * jacobi_normalizer(p) * std::pow(1.0 - x, p.alpha() + 0.5) *
         std::pow(1.0 + x, p.beta() + 0.5);
}

// ---------------------------------------------------------------------------

PolynomialFamily::PolynomialFamily(Kind kind, JacobiParams params, int max_degree)
    : kind_(kind), params_(params), max_degree_(max_degree) {
  if (max_degree < 0) throw std::invalid_argument("PolynomialFamily: negative max degree");
  const auto n_max = static_cast<std::size_t>(max_degree);
  a_.assign(n_max + 1, 0.0);
  sqrt_b_.assign(n_max + 2, 0.0);

  if (kind == Kind::Hermite) {
    for (std::size_t n = 1; n <= n_max + 1; ++n) sqrt_b_[n] = std::sqrt(static_cast<double>(n));
    return;
  }

  // Monic Jacobi recurrence for (1-x)^a (1+x)^b; the n = 0 and n = 1 entries
  // use the reduced forms that stay finite when a + b is 0 or -1.
  const double a = params.alpha();
  const double b = params.beta();
  const double s = a + b;
  a_[0] = (b - a) / (s + 2.0);
  for (std::size_t k = 1; k <= n_max; ++k) {
    const double n = static_cast<double>(k);
    a_[k] = (b * b - a * a) / ((2.0 * n + s) * (2.0 * n + s + 2.0));
  }
  sqrt_b_[1] = std::sqrt(4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + s) * (2.0 + s) * (3.0 + s)));
  for (std::size_t k = 2; k <= n_max + 1; ++k) {
    const double n = static_cast<double>(k);
    const double t = 2.0 * n + s;
    sqrt_b_[k] = std::sqrt(4.0 * n * (n + a) * (n + b) * (n + s) / (t * t * (t + 1.0) * (t - 1.0)));
  }
}

PolynomialFamily PolynomialFamily::jacobi(JacobiParams p, int max_degree) {
  return PolynomialFamily(Kind::Jacobi, p, max_degree);
}

PolynomialFamily PolynomialFamily::hermite(int max_degree) {
  return PolynomialFamily(Kind::Hermite, JacobiParams::legendre(), max_degree);
}

Measure PolynomialFamily::measure() const {
  return kind_ == Kind::Hermite ? Measure::gaussian() : Measure::jacobi(params_);
}

PolynomialFamily PolynomialFamily::with_degree(int max_degree) const {
  return PolynomialFamily(kind_, params_, max_degree);
}

double PolynomialFamily::checked_point(double x) const {
  if (std::isnan(x)) throw DomainError("polynomial evaluation at NaN");
  if (kind_ == Kind::Hermite) return x;
  if (std::abs(x) <= 1.0) return x;
  if (std::abs(x) <= 1.0 + kEndpointSlack) return std::copysign(1.0, x);
  throw DomainError("Jacobi polynomial evaluated outside [-1,1]: x = " + format_real(x));
}

PolyValue PolynomialFamily::eval(int n, double x) const {
  if (n < 0 || n > max_degree_) {
    throw std::out_of_range("PolynomialFamily::eval: degree " + std::to_string(n) +
                            " exceeds tabulated maximum " + std::to_string(max_degree_));
  }
  x = checked_point(x);
  double p_prev = 0.0;
  double p = 1.0;
  double d_prev = 0.0;
  double d = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double shift = x - a_[ku];
    const double p_next = (shift * p - sqrt_b_[ku] * p_prev) / sqrt_b_[ku + 1];
    const double d_next = (p + shift * d - sqrt_b_[ku] * d_prev) / sqrt_b_[ku + 1];
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d};
}

void PolynomialFamily::eval_all(double x, std::span<double> values, std::span<double> derivs) const {
  const std::size_t count = values.size();
  if (count == 0) return;
  if (count > static_cast<std::size_t>(max_degree_) + 1) {
    throw std::out_of_range("PolynomialFamily::eval_all: requested degree exceeds table");
  }
  const bool want_derivs = !derivs.empty();
  if (want_derivs && derivs.size() != count) {
    throw std::invalid_argument("PolynomialFamily::eval_all: derivative span size mismatch");
  }
  x = checked_point(x);
  values[0] = 1.0;
  if (want_derivs) derivs[0] = 0.0;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double shift = x - a_[k];
    const double p_prev = k == 0 ? 0.0 : values[k - 1];
    values[k + 1] = (shift * values[k] - sqrt_b_[k] * p_prev) / sqrt_b_[k + 1];
    if (want_derivs) {
      const double d_prev = k == 0 ? 0.0 : derivs[k - 1];
      derivs[k + 1] = (values[k] + shift * derivs[k] - sqrt_b_[k] * d_prev) / sqrt_b_[k + 1];
    }
  }
}

// ---------------------------------------------------------------------------

double derivative_constant_squared(int n, const JacobiParams& p) {
  if (n < 0) throw std::invalid_argument("derivative_constant: negative degree");
  const double a = p.alpha();
  const double b = p.beta();
  const double nn = static_cast<double>(n);
  return nn * (nn + a + b + 1.0) * (a + b + 2.0) * (a + b + 3.0) / (4.0 * (a + 1.0) * (b + 1.0));
}

double derivative_constant(int n, const JacobiParams& p) {
  return std::sqrt(derivative_constant_squared(n, p));
}

QuadratureRule gauss_quadrature(const PolynomialFamily& family, int m) {
  if (m < 1) throw std::invalid_argument("gauss_quadrature: need at least one node");
  const PolynomialFamily table = family.with_degree(m);
  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(std::max(m - 1, 0));
  for (int k = 0; k < m; ++k) diag[k] = table.recurrence_a(k);
  for (int k = 1; k < m; ++k) sub[k - 1] = table.recurrence_sqrt_b(k);

  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  if (m == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = 1.0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gauss_quadrature: tridiagonal eigensolver did not converge");
  }
  // Eigenvalues are refined by Newton on p_m and weights taken from the
  // Christoffel function 1 / sum_n p_n(x)^2, which keeps full relative
  // accuracy for the tiny tail weights of unbounded families.
  std::vector<double> vals(static_cast<std::size_t>(m) + 1);
  std::vector<double> ders(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k < m; ++k) {
    double x = solver.eigenvalues()[k];
    for (int it = 0; it < 2; ++it) {
      table.eval_all(x, vals, ders);
      const double d = ders[static_cast<std::size_t>(m)];
      if (d == 0.0) break;
      x -= vals[static_cast<std::size_t>(m)] / d;
    }
    table.eval_all(x, vals);
    double christoffel = 0.0;
    for (int n = 0; n < m; ++n) christoffel += vals[static_cast<std::size_t>(n)] * vals[static_cast<std::size_t>(n)];
    rule.nodes[static_cast<std::size_t>(k)] = x;
    rule.weights[static_cast<std::size_t>(k)] = 1.0 / christoffel;
  }
  return rule;
}

void verify_derivative_constants(const JacobiParams& p, int max_degree) {
  if (max_degree < 1) return;
  const auto fam = PolynomialFamily::jacobi(p, max_degree);
  const auto rule = gauss_quadrature(PolynomialFamily::jacobi(p.shifted(), 1), max_degree);
  const auto count = static_cast<std::size_t>(max_degree) + 1;
  std::vector<double> vals(count);
  std::vector<double> ders(count);
  std::vector<double> second_moment(count, 0.0);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    fam.eval_all(rule.nodes[q], vals, ders);
    for (std::size_t n = 1; n < count; ++n) second_moment[n] += rule.weights[q] * ders[n] * ders[n];
  }
  for (std::size_t n = 1; n < count; ++n) {
    const double formula = derivative_constant_squared(static_cast<int>(n), p);
    if (std::abs(formula - second_moment[n]) > 1e-10 * formula) {
      throw std::logic_error("derivative constant mismatch at degree " + std::to_string(n) + ": formula " +
                             format_real(formula) + " vs quadrature " + format_real(second_moment[n]));
    }
  }
}

}  // namespace gepce
