#pragma once

// Basis pursuit (denoise) by Pareto-curve root finding with a spectral
// projected gradient inner solver (plus an active-set polish on the current
// face of the l1 ball), and a brute-force l0 oracle for small systems.

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

namespace gepce {

struct SolveOptions {
  double epsilon = 0.0;  // residual bound; 0 solves A c = b
  double opt_tol = 1e-6;
  int max_iters = 10'000;
  bool record_trace = false;
};

/// One (tau, phi(tau)) evaluation made while searching for phi(tau) = epsilon.
struct ParetoPoint {
  double tau;
  double phi;
};

struct IterationRecord {
  int iteration;
  double tau;
  double residual_norm;
  double duality_gap;
  double step;
};

struct RecoveryResult {
  Eigen::VectorXd c;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  double tau_final = 0.0;
  std::vector<ParetoPoint> pareto;
  std::vector<IterationRecord> trace;  // filled when record_trace is set
};

/// min ||c||_1 subject to ||A c - b||_2 <= epsilon. A converged result has
/// ||A c - b|| <= epsilon + opt_tol * ||b||. On hitting max_iters the iterate
/// with the smallest residual mismatch is returned with converged = false.
/// Throws std::invalid_argument on NaN input, a zero column or a size mismatch.
RecoveryResult solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SolveOptions& options = {});

/// Euclidean projection onto {c : ||c||_1 <= tau} by sort-and-threshold.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double tau);

/// Sparsest c with ||A c - b|| <= 1e-10 max(1, ||b||) over supports of size
/// <= s_max, least squares on each support, ties broken by smallest l1 norm.
/// Requires M <= 20 and s_max <= 4; throws std::runtime_error if no support fits.
Eigen::VectorXd brute_force_l0(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int s_max);

/// iteration,tau,residual_norm,duality_gap,step
void write_trace_csv(std::ostream& os, const RecoveryResult& result);

}  // namespace gepce
