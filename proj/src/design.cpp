#include "gepce/design.hpp"

#include "gepce/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace gepce {

namespace {

// sqrt(rho_basis / rho_sampling) along one axis.
double standard_axis_ratio(const PolynomialFamily& family, const Measure& sampling, double x) {
  if (!family.is_jacobi()) return 1.0;
  const auto& p = family.params();
  if (sampling.is_chebyshev()) return chebyshev_density_ratio(p, x);
  if (sampling.params() == p) return 1.0;
  return density(family.measure(), x) / density(sampling, x);
}

void check_support(const PceBasis& basis, const SampleBatch& samples) {
  if (samples.dim() != basis.dim()) throw std::invalid_argument("design: sample dimension differs from basis dimension");
  if (basis.is_jacobi() != samples.measure.is_jacobi()) {
    throw std::invalid_argument("design: sampling measure " + samples.measure.name() +
                                " does not share the support of the basis");
  }
}

void check_directions(const PceBasis& basis, const std::vector<int>& directions) {
  std::set<int> seen;
  for (int j : directions) {
    if (j < 0 || j >= basis.dim()) throw std::invalid_argument("design: gradient direction out of range");
    if (!seen.insert(j).second) throw std::invalid_argument("design: repeated gradient direction");
  }
}

GradientDesign assemble(const PceBasis& basis, const SampleBatch& samples, const SampleData* data,
                        const std::vector<int>& directions, unsigned threads) {
  check_support(basis, samples);
  check_directions(basis, directions);
  if (basis.is_jacobi() ? !samples.measure.is_chebyshev() : samples.measure.kind() != Measure::Kind::Gaussian) {
    throw std::invalid_argument("assemble_gradient_enhanced: unsupported pairing of " +
                                std::string(basis.is_jacobi() ? "Jacobi" : "Hermite") + " basis with " +
                                samples.measure.name() + " sampling");
  }
  const Eigen::Index n = samples.count();
  const auto m = static_cast<Eigen::Index>(basis.size());
  const int d = basis.dim();
  if (data != nullptr) {
    if (data->values.size() != n) throw std::invalid_argument("assemble_gradient_enhanced: need one value per sample");
    if (!directions.empty() && (data->gradients.rows() != n || data->gradients.cols() != d)) {
      throw std::invalid_argument("assemble_gradient_enhanced: missing gradient rows (need an N x d gradient matrix)");
    }
  }
  if (basis.is_jacobi()) {
    for (int axis = 0; axis < d; ++axis) verify_derivative_constants(basis.family(axis).params(), basis.degree());
  }

  GradientDesign g;
  g.directions = directions;
  const int blocks = g.blocks();
  g.phi.resize(n, m);
  g.phi_tilde.resize(n * blocks, m);
  g.W.resize(n * blocks);
  g.P = normalizer(basis, directions);

  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    std::vector<double> z(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) z[static_cast<std::size_t>(a)] = samples.points(i, a);
    std::vector<double> values(static_cast<std::size_t>(m));
    std::vector<double> grads(directions.empty() ? 0 : static_cast<std::size_t>(m * d));
    basis.eval_row(z, values, grads);
    for (Eigen::Index k = 0; k < m; ++k) {
      g.phi(i, k) = values[static_cast<std::size_t>(k)];
      g.phi_tilde(i, k) = values[static_cast<std::size_t>(k)];
    }
    g.W(i) = gradient_weight(basis, z, -1);
    for (int b = 1; b < blocks; ++b) {
      const int axis = directions[static_cast<std::size_t>(b - 1)];
      const Eigen::Index r = b * n + i;
      for (Eigen::Index k = 0; k < m; ++k) g.phi_tilde(r, k) = grads[static_cast<std::size_t>(axis * m + k)];
      g.W(r) = gradient_weight(basis, z, axis);
    }
  });

  g.phi_hat.resize(g.phi_tilde.rows(), m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index r = 0; r < g.phi_tilde.rows(); ++r) g.phi_hat(r, k) = g.W(r) * g.phi_tilde(r, k) * g.P(k);
  }

  if (data != nullptr) {
    g.f_tilde.resize(n * blocks);
    g.f_tilde.head(n) = data->values;
    for (int b = 1; b < blocks; ++b) g.f_tilde.segment(b * n, n) = data->gradients.col(directions[static_cast<std::size_t>(b - 1)]);
    g.f_hat = g.W.cwiseProduct(g.f_tilde);
  }
  return g;
}

// Row of W-weighted, P-scaled blocks at one point: out[b * M + k].
void stacked_row(const PceBasis& basis, std::span<const double> z, const std::vector<int>& directions,
                 const Eigen::VectorXd& P, std::vector<double>& values, std::vector<double>& grads,
                 std::vector<double>& out) {
  const auto m = basis.size();
  basis.eval_row(z, values, grads);
  const double w0 = gradient_weight(basis, z, -1);
  for (std::size_t k = 0; k < m; ++k) out[k] = w0 * values[k] * P(static_cast<Eigen::Index>(k));
  for (std::size_t b = 1; b <= directions.size(); ++b) {
    const auto axis = static_cast<std::size_t>(directions[b - 1]);
    const double w = gradient_weight(basis, z, directions[b - 1]);
    for (std::size_t k = 0; k < m; ++k) out[b * m + k] = w * grads[axis * m + k] * P(static_cast<Eigen::Index>(k));
  }
}

Eigen::Index rank_at(const Eigen::VectorXd& singular, double tol) {
  if (singular.size() == 0 || singular(0) == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < singular.size() && singular(r) > tol * singular(0)) ++r;
  return r;
}

}  // namespace

StandardDesign assemble_standard(const PceBasis& basis, const SampleBatch& samples, bool precondition,
                                 unsigned threads) {
  check_support(basis, samples);
  const Eigen::Index n = samples.count();
  const auto m = static_cast<Eigen::Index>(basis.size());
  const int d = basis.dim();
  StandardDesign s{Eigen::MatrixXd(n, m), Eigen::VectorXd::Ones(n)};
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    std::vector<double> z(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) z[static_cast<std::size_t>(a)] = samples.points(i, a);
    std::vector<double> values(static_cast<std::size_t>(m));
    basis.eval_row(z, values);
    double w = 1.0;
    if (precondition) {
      double ratio = 1.0;
      for (int a = 0; a < d; ++a) ratio *= standard_axis_ratio(basis.family(a), samples.measure, z[static_cast<std::size_t>(a)]);
      w = std::sqrt(ratio);
    }
    s.weights(i) = w;
    for (Eigen::Index k = 0; k < m; ++k) s.matrix(i, k) = w * values[static_cast<std::size_t>(k)];
  });
  return s;
}

std::vector<int> all_directions(int dim) {
  std::vector<int> out(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) out[static_cast<std::size_t>(j)] = j;
  return out;
}

GradientDesign assemble_gradient_enhanced(const PceBasis& basis, const SampleBatch& samples, const SampleData& data,
                                          const std::vector<int>& directions, unsigned threads) {
  return assemble(basis, samples, &data, directions, threads);
}

GradientDesign assemble_gradient_enhanced(const PceBasis& basis, const SampleBatch& samples, const SampleData& data,
                                          unsigned threads) {
  return assemble(basis, samples, &data, all_directions(basis.dim()), threads);
}

GradientDesign assemble_gradient_enhanced(const PceBasis& basis, const SampleBatch& samples,
                                          const std::vector<int>& directions, unsigned threads) {
  return assemble(basis, samples, nullptr, directions, threads);
}

double gradient_weight(const PceBasis& basis, std::span<const double> z, int shifted_axis) {
  if (!basis.is_jacobi()) return 1.0;
  double ratio = 1.0;
  for (int a = 0; a < basis.dim(); ++a) {
    const auto& p = basis.family(a).params();
    ratio *= chebyshev_density_ratio(a == shifted_axis ? p.shifted() : p, z[static_cast<std::size_t>(a)]);
  }
  return std::sqrt(ratio);
}

Eigen::VectorXd normalizer(const PceBasis& basis, const std::vector<int>& directions) {
  check_directions(basis, directions);
  const auto m = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd P(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& idx = basis.indices()[static_cast<std::size_t>(k)];
    double sum = 1.0;
    for (int j : directions) {
      const int kj = idx[static_cast<std::size_t>(j)];
      sum += basis.is_jacobi() ? derivative_constant_squared(kj, basis.family(j).params()) : static_cast<double>(kj);
    }
    P(k) = 1.0 / std::sqrt(sum);
  }
  return P;
}

double mic(const Eigen::MatrixXd& matrix) {
  if (matrix.cols() < 2) throw std::invalid_argument("mic: need at least two columns");
  const Eigen::VectorXd norms = matrix.colwise().norm();
  if ((norms.array() == 0.0).any()) throw std::invalid_argument("mic: zero column");
  const Eigen::MatrixXd unit = matrix * norms.cwiseInverse().asDiagonal();
  Eigen::MatrixXd gram = unit.transpose() * unit;
  gram.diagonal().setZero();
  return std::min(1.0, gram.cwiseAbs().maxCoeff());
}

bool recovery_guarantee(double mic_value, int s) {
  if (s < 1) throw std::invalid_argument("recovery_guarantee: sparsity must be >= 1");
  return mic_value < 1.0 / (2.0 * s - 1.0);
}

double coherence_bound(const PceBasis& basis) {
  if (!basis.is_jacobi()) return std::numeric_limits<double>::infinity();
  double bound = 1.0;
  for (int a = 0; a < basis.dim(); ++a) {
    const auto& p = basis.family(a).params();
    bound *= 2.0 * std::numbers::e * (2.0 + std::hypot(p.alpha(), p.beta()));
  }
  return bound;
}

double coherence_constant(const PceBasis& basis, const std::vector<int>& directions) {
  if (!basis.is_jacobi()) return 1.0;
  double c = 1.0;
  for (int j : directions) {
    const auto& p = basis.family(j).params();
    c = std::max(c, (2.0 + std::hypot(p.alpha() + 1.0, p.beta() + 1.0)) / (2.0 + std::hypot(p.alpha(), p.beta())));
  }
  return c;
}

CoherenceReport coherence_params(const PceBasis& basis, const GradientDesign& design) {
  const Eigen::Index n = design.samples();
  const Eigen::Index m = design.columns();
  if (n == 0 || m == 0) throw std::invalid_argument("coherence_params: empty design");
  CoherenceReport r;
  r.mic = m >= 2 ? mic(design.phi_hat) : 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = design.W(i) * design.phi(i, k);
      r.mu_L = std::max(r.mu_L, v * v);
      double stacked = 0.0;
      for (int b = 0; b < design.blocks(); ++b) {
        const double e = design.phi_hat(b * n + i, k);
        stacked += e * e;
      }
      r.beta_L = std::max(r.beta_L, stacked);
    }
  }
  r.theorem_bound = coherence_bound(basis);
  r.C_constant = coherence_constant(basis, design.directions);
  return r;
}

CoherenceReport coherence_params(const PceBasis& basis, const StandardDesign& design) {
  if (design.matrix.size() == 0) throw std::invalid_argument("coherence_params: empty design");
  CoherenceReport r;
  r.mic = design.matrix.cols() >= 2 ? mic(design.matrix) : 0.0;
  r.mu_L = design.matrix.cwiseAbs2().maxCoeff();
  r.theorem_bound = coherence_bound(basis);
  r.C_constant = 1.0;
  return r;
}

GridCoherence coherence_grid_scan(const PceBasis& basis, int points_per_axis, const std::vector<int>& directions,
                                  unsigned threads) {
  if (!basis.is_jacobi()) throw std::invalid_argument("coherence_grid_scan: Jacobi bases only");
  if (basis.dim() > 2) throw std::invalid_argument("coherence_grid_scan: d <= 2 only");
  if (points_per_axis < 2) throw std::invalid_argument("coherence_grid_scan: need at least two points per axis");
  check_directions(basis, directions);
  const int d = basis.dim();
  const auto per = static_cast<std::size_t>(points_per_axis);
  const std::size_t total = d == 1 ? per : per * per;
  const auto m = basis.size();
  const Eigen::VectorXd P = normalizer(basis, directions);
  const auto node = [&](std::size_t g) { return -1.0 + 2.0 * static_cast<double>(g) / static_cast<double>(per - 1); };

  const std::size_t chunks = std::min<std::size_t>(64, total);
  std::vector<GridCoherence> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::vector<double> z(static_cast<std::size_t>(d));
    std::vector<double> values(m);
    std::vector<double> grads(m * static_cast<std::size_t>(d));
    std::vector<double> row(m * (1 + directions.size()));
    GridCoherence local;
    for (std::size_t q = total * c / chunks; q < total * (c + 1) / chunks; ++q) {
      z[0] = node(q % per);
      if (d == 2) z[1] = node(q / per);
      stacked_row(basis, z, directions, P, values, grads, row);
      const double w0 = gradient_weight(basis, z, -1);
      for (std::size_t k = 0; k < m; ++k) {
        const double v = w0 * values[k];
        local.mu_L = std::max(local.mu_L, v * v);
        double s = 0.0;
        for (std::size_t b = 0; b <= directions.size(); ++b) s += row[b * m + k] * row[b * m + k];
        local.beta_L = std::max(local.beta_L, s);
      }
    }
    partial[c] = local;
  });
  GridCoherence out;
  for (const auto& p : partial) {
    out.mu_L = std::max(out.mu_L, p.mu_L);
    out.beta_L = std::max(out.beta_L, p.beta_L);
  }
  return out;
}

double isotropy_gap(const GradientDesign& design) {
  const auto n = static_cast<double>(design.samples());
  const Eigen::MatrixXd second = design.phi_hat.transpose() * design.phi_hat / n;
  return (second - Eigen::MatrixXd::Identity(second.rows(), second.cols())).cwiseAbs().maxCoeff();
}

double isotropy_gap_quadrature(const PceBasis& basis, const std::vector<int>& directions) {
  const int d = basis.dim();
  if (d > 4) throw std::invalid_argument("isotropy_gap_quadrature: d > 4 rejected");
  check_directions(basis, directions);
  const auto m = static_cast<Eigen::Index>(basis.size());
  const Eigen::VectorXd P = normalizer(basis, directions);
  const int nodes = basis.degree() + 1;
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> values(static_cast<std::size_t>(m));
  std::vector<double> grads(static_cast<std::size_t>(m * d));
  Eigen::VectorXd v(m);

  // Block b's weight W^b squared turns the Chebyshev expectation into one
  // under the block's own reference measure, which the Gauss rule integrates.
  for (int b = 0; b <= static_cast<int>(directions.size()); ++b) {
    const int axis = b == 0 ? -1 : directions[static_cast<std::size_t>(b - 1)];
    std::vector<PolynomialFamily> families;
    for (int a = 0; a < d; ++a) {
      const auto& f = basis.family(a);
      families.push_back(f.is_jacobi() && a == axis ? PolynomialFamily::jacobi(f.params().shifted(), basis.degree()) : f);
    }
    const auto rule = tensor_gauss_quadrature(families, nodes);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      basis.eval_row(rule.point(q), values, grads);
      for (Eigen::Index k = 0; k < m; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        v(k) = (axis < 0 ? values[kk] : grads[static_cast<std::size_t>(axis) * static_cast<std::size_t>(m) + kk]) * P(k);
      }
      second.noalias() += rule.weights[q] * v * v.transpose();
    }
  }
  return (second - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
}

IsotropyEstimate isotropy_gap_monte_carlo(const PceBasis& basis, Eigen::Index count, std::uint64_t seed,
                                          const std::vector<int>& directions, unsigned threads) {
  if (count < 2) throw std::invalid_argument("isotropy_gap_monte_carlo: need at least two samples");
  check_directions(basis, directions);
  const Measure measure = basis.is_jacobi() ? Measure::chebyshev() : Measure::gaussian();
  const auto batch = sample(measure, basis.dim(), count, seed);
  const auto m = static_cast<Eigen::Index>(basis.size());
  const auto blocks = static_cast<Eigen::Index>(1 + directions.size());
  const Eigen::VectorXd P = normalizer(basis, directions);

  const std::size_t chunks = std::min<std::size_t>(16, static_cast<std::size_t>(count));
  std::vector<Eigen::MatrixXd> sum(chunks), sum_sq(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd y(m, m);
    std::vector<double> z(static_cast<std::size_t>(basis.dim()));
    std::vector<double> values(static_cast<std::size_t>(m));
    std::vector<double> grads(static_cast<std::size_t>(m * basis.dim()));
    std::vector<double> row(static_cast<std::size_t>(m * blocks));
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = n * c / chunks; i < n * (c + 1) / chunks; ++i) {
      for (int a = 0; a < basis.dim(); ++a) z[static_cast<std::size_t>(a)] = batch.points(static_cast<Eigen::Index>(i), a);
      stacked_row(basis, z, directions, P, values, grads, row);
      const Eigen::Map<const Eigen::MatrixXd> V(row.data(), m, blocks);
      y.noalias() = V * V.transpose();
      s1 += y;
      s2 += y.cwiseAbs2();
    }
    sum[c] = std::move(s1);
    sum_sq[c] = std::move(s2);
  });

  Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t c = 0; c < chunks; ++c) {
    s1 += sum[c];
    s2 += sum_sq[c];
  }
  const auto n = static_cast<double>(count);
  IsotropyEstimate est;
  est.mean = s1 / n;
  const Eigen::MatrixXd var = ((s2 / n) - est.mean.cwiseAbs2()).cwiseMax(0.0) * (n / (n - 1.0));
  est.standard_error = (var / n).cwiseSqrt();
  const Eigen::MatrixXd dev = (est.mean - Eigen::MatrixXd::Identity(m, m)).cwiseAbs();
  est.gap = dev.maxCoeff();
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      const double se = est.standard_error(k, l);
      if (se > 0.0) {
        est.max_z = std::max(est.max_z, dev(k, l) / se);
      } else if (dev(k, l) > 1e-14) {
        est.max_z = std::numeric_limits<double>::infinity();
      }
    }
  }
  return est;
}

NullspaceReport nullspace_containment(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& phi_hat, double tol) {
  if (phi.cols() != phi_hat.cols()) throw std::invalid_argument("nullspace_containment: column count mismatch");
  const Eigen::Index m = phi.cols();
  NullspaceReport r;
  const Eigen::BDCSVD<Eigen::MatrixXd> svd_hat(phi_hat, Eigen::ComputeFullV);
  const Eigen::BDCSVD<Eigen::MatrixXd> svd_phi(phi);
  const Eigen::Index rank_hat = rank_at(svd_hat.singularValues(), tol);
  r.nullity_phi_hat = m - rank_hat;
  r.nullity_phi = m - rank_at(svd_phi.singularValues(), tol);
  const double phi_norm = svd_phi.singularValues().size() ? svd_phi.singularValues()(0) : 0.0;
  for (Eigen::Index j = rank_hat; j < m; ++j) {
    const double norm = (phi * svd_hat.matrixV().col(j)).norm();
    const double ratio = phi_norm > 0.0 ? norm / phi_norm : norm;
    r.worst_ratio = std::max(r.worst_ratio, ratio);
  }
  r.contained = r.worst_ratio <= tol;
  return r;
}

NullspaceReport nullspace_containment(const GradientDesign& design, double tol) {
  return nullspace_containment(design.phi_scaled(), design.phi_hat, tol);
}

}  // namespace gepce
