#pragma once

// Measurement systems for standard and gradient-enhanced l1 recovery, and the
// coherence / isotropy diagnostics computed from them.

#include "gepce/pce.hpp"
#include "gepce/sampling.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace gepce {

/// Preconditioned or plain N x M value matrix with its row weights.
struct StandardDesign {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd weights;  // all ones when not preconditioned
};

/// Rows scaled by sqrt(rho_basis / rho_sampling) when `precondition` is set.
/// Throws std::invalid_argument when the sample and basis supports differ.
StandardDesign assemble_standard(const PceBasis& basis, const SampleBatch& samples, bool precondition,
                                 unsigned threads = 1);

/// Function values and an N x d gradient matrix (may be empty when no
/// gradient directions are used).
struct SampleData {
  Eigen::VectorXd values;
  Eigen::MatrixXd gradients;
};

/// The stacked system phi_hat = W phi_tilde P. Row block 0 holds values,
/// block b >= 1 holds partial derivatives along directions[b-1].
struct GradientDesign {
  std::vector<int> directions;
  Eigen::MatrixXd phi;        // N x M
  Eigen::MatrixXd phi_tilde;  // N (1 + |directions|) x M
  Eigen::VectorXd W;
  Eigen::VectorXd P;
  Eigen::MatrixXd phi_hat;
  Eigen::VectorXd f_tilde;  // empty when assembled without data
  Eigen::VectorXd f_hat;    // W f_tilde

  Eigen::Index samples() const { return phi.rows(); }
  Eigen::Index columns() const { return phi.cols(); }
  int blocks() const { return 1 + static_cast<int>(directions.size()); }

  /// Row block b of a stacked matrix or vector.
  auto block(const Eigen::MatrixXd& stacked, int b) const { return stacked.middleRows(b * samples(), samples()); }

  /// phi with the same column scaling as phi_hat: phi_hat's value block
  /// equals diag(W^0) * phi_scaled().
  Eigen::MatrixXd phi_scaled() const { return phi * P.asDiagonal(); }

  /// Maps a solution of phi_hat c' = f_hat to PCE coefficients c = P c'.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& scaled) const { return P.cwiseProduct(scaled); }
};

/// Every axis, in order.
std::vector<int> all_directions(int dim);

/// Jacobi bases must be sampled from the Chebyshev measure and Hermite bases
/// from the Gaussian measure. `directions` lists distinct axes in [0, d).
GradientDesign assemble_gradient_enhanced(const PceBasis& basis, const SampleBatch& samples, const SampleData& data,
                                          const std::vector<int>& directions, unsigned threads = 1);
GradientDesign assemble_gradient_enhanced(const PceBasis& basis, const SampleBatch& samples, const SampleData& data,
                                          unsigned threads = 1);
/// Matrices only; f_tilde and f_hat stay empty.
GradientDesign assemble_gradient_enhanced(const PceBasis& basis, const SampleBatch& samples,
                                          const std::vector<int>& directions, unsigned threads = 1);

/// W^0 weight at one point (W^b for b = 1 + j uses the family shifted along
/// axis directions[b-1]). Jacobi weights assume Chebyshev sampling; Hermite
/// weights are one.
double gradient_weight(const PceBasis& basis, std::span<const double> z, int shifted_axis);

/// Diagonal of P for the given directions: (1 + sum_j c^2(k_j))^(-1/2), or
/// (1 + sum_j k_j)^(-1/2) for Hermite.
Eigen::VectorXd normalizer(const PceBasis& basis, const std::vector<int>& directions);

/// Largest normalised absolute inner product between distinct columns.
double mic(const Eigen::MatrixXd& matrix);

/// mic < 1 / (2s - 1).
bool recovery_guarantee(double mic_value, int s);

struct CoherenceReport {
  double mic = 0.0;            // of phi_hat
  double mu_L = 0.0;           // max (W^0 psi_k(z))^2
  double beta_L = 0.0;         // max over samples and columns of the squared stacked column block
  double theorem_bound = 0.0;  // prod_j 2e (2 + sqrt(alpha_j^2 + beta_j^2)); +inf for Hermite
  double C_constant = 1.0;

  /// Right-hand side for beta_L.
  double beta_bound() const { return C_constant * theorem_bound; }
};

CoherenceReport coherence_params(const PceBasis& basis, const GradientDesign& design);
/// mu_L only, from a preconditioned standard matrix; beta_L is left at 0.
CoherenceReport coherence_params(const PceBasis& basis, const StandardDesign& design);

/// prod_j 2e (2 + sqrt(alpha_j^2 + beta_j^2)) over the basis axes.
double coherence_bound(const PceBasis& basis);
/// max over `directions` of (2 + sqrt((a+1)^2 + (b+1)^2)) / (2 + sqrt(a^2 + b^2)).
double coherence_constant(const PceBasis& basis, const std::vector<int>& directions);

/// mu_L and beta_L maximised over a uniform tensor grid on [-1,1]^d with
/// `points_per_axis` nodes including the endpoints. Jacobi bases with d <= 2.
struct GridCoherence {
  double mu_L = 0.0;
  double beta_L = 0.0;
};
GridCoherence coherence_grid_scan(const PceBasis& basis, int points_per_axis, const std::vector<int>& directions,
                                  unsigned threads = 1);

/// max_{k,l} |(1/N) phi_hat^T phi_hat - I|_{kl}.
double isotropy_gap(const GradientDesign& design);

/// Exact E[(1/N) phi_hat^T phi_hat] under the prescribed sampling measure, by
/// tensor Gauss rules of each block's reference measure. Rejects d > 4.
double isotropy_gap_quadrature(const PceBasis& basis, const std::vector<int>& directions);

/// Streaming Monte Carlo estimate over `count` prescribed-measure samples.
/// `max_z` is the largest |deviation| / standard-error over all entries, the
/// standard error being estimated from the same draws.
struct IsotropyEstimate {
  double gap = 0.0;
  double max_z = 0.0;
  Eigen::MatrixXd mean;  // M x M
  Eigen::MatrixXd standard_error;
};
IsotropyEstimate isotropy_gap_monte_carlo(const PceBasis& basis, Eigen::Index count, std::uint64_t seed,
                                          const std::vector<int>& directions, unsigned threads = 1);

struct NullspaceReport {
  bool contained = true;
  Eigen::Index nullity_phi = 0;
  Eigen::Index nullity_phi_hat = 0;
  /// max over nullspace vectors v of phi_hat of ||phi v|| / ||phi||_2.
  double worst_ratio = 0.0;

  bool strict() const { return nullity_phi > nullity_phi_hat; }
};

/// Checks that every right-singular vector of phi_hat with singular value
/// <= tol * sigma_max (including the columns beyond its rank) satisfies
/// ||phi v|| <= tol * ||phi||_2.
NullspaceReport nullspace_containment(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& phi_hat, double tol);
/// Uses phi_scaled(), the value block up to its invertible column scaling.
NullspaceReport nullspace_containment(const GradientDesign& design, double tol);

}  // namespace gepce
