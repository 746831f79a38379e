#pragma once

// Parametric 1-D diffusion problem -(a u')' = g on (0,1), u(0) = u(1) = 0,
// solved by a conservative finite-difference scheme, with quantity-of-interest
// gradients from one adjoint solve, and PCE surrogates built from them.

#include "gepce/harness.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gepce {

enum class LoadKind { CosSin, Unit };  // g(y) = cos(y) sin(y), or g = 1
enum class QoiKind { Average, Midpoint };  // integral of u, or u(1/2)

std::string to_string(LoadKind load);
std::string to_string(QoiKind qoi);
LoadKind parse_load(const std::string& name);
QoiKind parse_qoi(const std::string& name);

/// a(y, xi) = offset + exp(log_mean + variability * (xi_1 sqrt(sqrt(pi) L / 2)
///            + sum_{i>=2} zeta_i g_i(y) xi_i)),
/// zeta_i = sqrt(sqrt(pi) L) exp(-(floor(i/2) pi L)^2 / 8),
/// g_i(y) = sin(-floor(i/2) pi y) for even i, cos(-floor(i/2) pi y) for odd i.
/// Parameters are 1-based in the formulas and 0-based in xi.
struct DiffusionModel {
  int d = 3;
  double L = 1.0 / 12.0;
  int cells = 1024;  // mesh width h = 1 / cells
  double offset = 0.5;
  double log_mean = 1.0;
  double variability = 1.0;
  LoadKind load = LoadKind::CosSin;
  QoiKind qoi = QoiKind::Average;

  /// a = 1 everywhere (offset 0, log_mean 0, variability 0).
  static DiffusionModel constant(int d, int cells);

  double h() const { return 1.0 / cells; }
  /// zeta_i for the 1-based index i >= 2.
  double zeta(int i) const;
  /// d log(a - offset) / d xi_i at y, 1-based i.
  double log_sensitivity(int i, double y) const;
  double coefficient(double y, std::span<const double> xi) const;
  double load_at(double y) const;

  /// Throws std::invalid_argument on d < 1, h > 1/64, L <= 0, an odd cell
  /// count with the midpoint QoI, or offset < 0.
  void validate() const;
};

struct BvpSolution {
  Eigen::VectorXd u;         // nodal values y_j = j h, j = 0..cells
  double qoi = 0.0;
  Eigen::VectorXd gradient;  // dQ / dxi, size d
  double residual = 0.0;     // ||K u - F|| / (||K|| ||u|| + ||F||), infinity norms
};

/// xi in [-1,1]^d. Harmonic averages of the nodal coefficient on cell faces,
/// an exact flux-recurrence solve of the tridiagonal system, trapezoid QoI,
/// and the adjoint system K lambda = dQ/du for the gradient.
BvpSolution solve_bvp(const DiffusionModel& model, std::span<const double> xi);

struct Moments {
  double mean = 0.0;
  double std = 0.0;
  double standard_error = 0.0;  // of the mean; 0 for quadrature
};

/// Tensor Gauss-Legendre over [-1,1]^d with `points_per_axis` nodes per axis.
Moments reference_moments_quadrature(const DiffusionModel& model, int points_per_axis, unsigned threads = 0);
/// Plain Monte Carlo with uniform xi.
Moments reference_moments_monte_carlo(const DiffusionModel& model, int count, std::uint64_t seed,
                                      unsigned threads = 0);

struct SurrogateOptions {
  int n = 5;  // total degree of the Legendre basis
  int N = 20;
  Mode mode = Mode::GradientEnhanced;
  std::uint64_t seed = 1;
  double epsilon = 1e-8;  // relative to ||f_tilde||_2
  double opt_tol = 1e-10;
  int max_iters = 20'000;
  unsigned threads = 0;
};

struct Surrogate {
  Eigen::VectorXd coefficients;
  double mean = 0.0;  // c_0
  double std = 0.0;   // sqrt(sum_{k>0} c_k^2)
};

/// Chebyshev samples, QoI values (and all d adjoint gradients for
/// gradient-enhanced mode; standard-double takes (1 + d) N values), l1 recovery.
/// Solver exceptions propagate.
Surrogate build_surrogate(const DiffusionModel& model, const SurrogateOptions& options);

struct BvpStudyOptions {
  DiffusionModel model;
  int n = 5;
  std::vector<int> N_values{10, 20, 40, 80};
  std::vector<Mode> modes{Mode::Standard, Mode::GradientEnhanced};
  int seeds = 10;
  std::uint64_t seed = 1;
  int reference_points = 20;
  double epsilon = 1e-8;
  double opt_tol = 1e-10;
  int max_iters = 20'000;
  unsigned threads = 0;
};

/// mode,N,mean_error,std_error: medians over seeds of |mean - reference| and
/// |std - reference| against the quadrature reference.
Table run_bvp_study(const BvpStudyOptions& options);

}  // namespace gepce
