#include "gepce/adjoint_bvp.hpp"

#include "gepce/design.hpp"
#include "gepce/l1solver.hpp"
#include "gepce/parallel.hpp"
#include "gepce/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gepce {

namespace {

// Solves K x = rhs for the conservative operator
//   (K x)_j = -(face_j (x_{j+1} - x_j) - face_{j-1} (x_j - x_{j-1})) / h^2,
// x_0 = x_n = 0, through the face fluxes s_j = face_j (x_{j+1} - x_j) / h,
// which satisfy s_j = s_0 - h sum_{k<=j} rhs_k. This avoids the 1/h^2
// cancellation of a tridiagonal elimination. rhs holds the n-1 interior rows.
Eigen::VectorXd solve_conservative(const Eigen::VectorXd& face, const Eigen::VectorXd& rhs, double h) {
  const Eigen::Index n = face.size();
  Eigen::VectorXd S(n);  // h sum_{k=1..j} rhs_k at face j
  S(0) = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) S(j) = S(j - 1) + h * rhs(j - 1);
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(face(j) > 0.0)) throw std::logic_error("solve_bvp: singular system");
    num += S(j) / face(j);
    den += 1.0 / face(j);
  }
  const double s0 = num / den;
  Eigen::VectorXd x(n + 1);
  x(0) = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) x(j + 1) = x(j) + h * (s0 - S(j)) / face(j);
  x(n) = 0.0;
  return x;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace

std::string to_string(LoadKind load) { return load == LoadKind::CosSin ? "cos-sin" : "unit"; }
std::string to_string(QoiKind qoi) { return qoi == QoiKind::Average ? "average" : "midpoint"; }

LoadKind parse_load(const std::string& name) {
  if (name == "cos-sin") return LoadKind::CosSin;
  if (name == "unit") return LoadKind::Unit;
  throw std::invalid_argument("unknown load '" + name + "'");
}

QoiKind parse_qoi(const std::string& name) {
  if (name == "average") return QoiKind::Average;
  if (name == "midpoint") return QoiKind::Midpoint;
  throw std::invalid_argument("unknown QoI '" + name + "'");
}

DiffusionModel DiffusionModel::constant(int d, int cells) {
  DiffusionModel m;
  m.d = d;
  m.cells = cells;
  m.offset = 0.0;
  m.log_mean = 0.0;
  m.variability = 0.0;
  return m;
}

double DiffusionModel::zeta(int i) const {
  if (i < 2) throw std::invalid_argument("zeta: index must be >= 2");
  const double k = std::floor(i / 2.0);
  return std::sqrt(std::sqrt(std::numbers::pi) * L) * std::exp(-std::pow(k * std::numbers::pi * L, 2) / 8.0);
}

double DiffusionModel::log_sensitivity(int i, double y) const {
  if (i == 1) return variability * std::sqrt(std::sqrt(std::numbers::pi) * L / 2.0);
  const double arg = -std::floor(i / 2.0) * std::numbers::pi * y;
  return variability * zeta(i) * (i % 2 == 0 ? std::sin(arg) : std::cos(arg));
}

double DiffusionModel::coefficient(double y, std::span<const double> xi) const {
  double s = log_mean;
  for (int i = 1; i <= d; ++i) s += log_sensitivity(i, y) * xi[static_cast<std::size_t>(i - 1)];
  return offset + std::exp(s);
}

double DiffusionModel::load_at(double y) const { return load == LoadKind::Unit ? 1.0 : std::cos(y) * std::sin(y); }

void DiffusionModel::validate() const {
  if (d < 1) throw std::invalid_argument("DiffusionModel: d must be >= 1");
  if (cells < 64) throw std::invalid_argument("DiffusionModel: mesh width must be <= 1/64");
  if (!(L > 0.0)) throw std::invalid_argument("DiffusionModel: L must be > 0");
  if (!(offset >= 0.0)) throw std::invalid_argument("DiffusionModel: offset must be >= 0");
  if (qoi == QoiKind::Midpoint && cells % 2 != 0) {
    throw std::invalid_argument("DiffusionModel: the midpoint QoI needs an even cell count");
  }
}

BvpSolution solve_bvp(const DiffusionModel& model, std::span<const double> xi) {
  model.validate();
  if (xi.size() != static_cast<std::size_t>(model.d)) throw std::invalid_argument("solve_bvp: xi must have size d");
  for (double v : xi) {
    if (!(std::abs(v) <= 1.0)) throw std::invalid_argument("solve_bvp: xi must lie in [-1,1]^d");
  }
  const int n = model.cells;
  const double h = model.h();
  const double h2 = h * h;

  Eigen::VectorXd a(n + 1);
  for (int j = 0; j <= n; ++j) a(j) = model.coefficient(j * h, xi);
  // Face j sits between nodes j and j+1.
  Eigen::VectorXd face(n);
  for (int j = 0; j < n; ++j) face(j) = 2.0 * a(j) * a(j + 1) / (a(j) + a(j + 1));

  // Interior rows j = 1..n-1 stored at k = j - 1.
  const int m = n - 1;
  Eigen::VectorXd F(m), q = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < m; ++k) F(k) = model.load_at((k + 1) * h);
  if (model.qoi == QoiKind::Average) {
    q.setConstant(h);  // trapezoid weights; the boundary values are zero
  } else {
    q(n / 2 - 1) = 1.0;
  }

  BvpSolution sol;
  sol.u = solve_conservative(face, F, h);
  const Eigen::VectorXd lam = solve_conservative(face, q, h);
  sol.qoi = q.dot(sol.u.segment(1, m));

  // Normwise backward error ||K u - F|| / (||K|| ||u|| + ||F||), infinity norms.
  double r_max = 0.0;
  double k_max = 0.0;
  for (int j = 1; j < n; ++j) {
    const double Ku = -(face(j) * (sol.u(j + 1) - sol.u(j)) - face(j - 1) * (sol.u(j) - sol.u(j - 1))) / h2;
    r_max = std::max(r_max, std::abs(Ku - F(j - 1)));
    k_max = std::max(k_max, 2.0 * (face(j - 1) + face(j)) / h2);
  }
  sol.residual = r_max / (k_max * sol.u.lpNorm<Eigen::Infinity>() + F.lpNorm<Eigen::Infinity>());

  // dQ/dxi_i = -lambda^T (dK/dxi_i) u; face j contributes
  // (d a_f / d xi_i) / h^2 (lambda_{j+1} - lambda_j)(u_{j+1} - u_j).
  sol.gradient = Eigen::VectorXd::Zero(model.d);
  for (int j = 0; j < n; ++j) {
    const double aj = a(j);
    const double ak = a(j + 1);
    const double sum2 = (aj + ak) * (aj + ak);
    const double dfa_j = 2.0 * ak * ak / sum2;
    const double dfa_k = 2.0 * aj * aj / sum2;
    const double flux = (lam(j + 1) - lam(j)) * (sol.u(j + 1) - sol.u(j)) / h2;
    for (int i = 1; i <= model.d; ++i) {
      const double da_j = (aj - model.offset) * model.log_sensitivity(i, j * h);
      const double da_k = (ak - model.offset) * model.log_sensitivity(i, (j + 1) * h);
      sol.gradient(i - 1) -= (dfa_j * da_j + dfa_k * da_k) * flux;
    }
  }
  return sol;
}

Moments reference_moments_quadrature(const DiffusionModel& model, int points_per_axis, unsigned threads) {
  model.validate();
  if (points_per_axis < 1) throw std::invalid_argument("reference_moments_quadrature: points_per_axis must be >= 1");
  const std::vector<PolynomialFamily> fams(static_cast<std::size_t>(model.d),
                                           PolynomialFamily::legendre(points_per_axis));
  const TensorRule rule = tensor_gauss_quadrature(fams, points_per_axis);
  std::vector<double> q(rule.size());
  parallel_for(rule.size(), threads, [&](std::size_t p) { q[p] = solve_bvp(model, rule.point(p)).qoi; });
  Moments m;
  for (std::size_t p = 0; p < q.size(); ++p) m.mean += rule.weights[p] * q[p];
  double var = 0.0;
  for (std::size_t p = 0; p < q.size(); ++p) var += rule.weights[p] * (q[p] - m.mean) * (q[p] - m.mean);
  m.std = std::sqrt(var);
  return m;
}

Moments reference_moments_monte_carlo(const DiffusionModel& model, int count, std::uint64_t seed, unsigned threads) {
  model.validate();
  if (count < 2) throw std::invalid_argument("reference_moments_monte_carlo: count must be >= 2");
  const SampleBatch pts = sample(Measure::uniform(), model.d, count, seed);
  std::vector<double> q(static_cast<std::size_t>(count));
  parallel_for(q.size(), threads, [&](std::size_t p) {
    std::vector<double> xi(static_cast<std::size_t>(model.d));
    for (int a = 0; a < model.d; ++a) xi[static_cast<std::size_t>(a)] = pts.points(static_cast<Eigen::Index>(p), a);
    q[p] = solve_bvp(model, xi).qoi;
  });
  Moments m;
  for (double v : q) m.mean += v;
  m.mean /= count;
  double var = 0.0;
  for (double v : q) var += (v - m.mean) * (v - m.mean);
  var /= count - 1;
  m.std = std::sqrt(var);
  m.standard_error = m.std / std::sqrt(static_cast<double>(count));
  return m;
}

Surrogate build_surrogate(const DiffusionModel& model, const SurrogateOptions& options) {
  model.validate();
  if (options.N < 1) throw std::invalid_argument("build_surrogate: N must be >= 1");
  const int d = model.d;
  const PceBasis basis = PceBasis::legendre(d, options.n);
  const Eigen::Index total = static_cast<Eigen::Index>(options.N) * (options.mode == Mode::StandardDouble ? 1 + d : 1);
  const SampleBatch pts = sample(Measure::chebyshev(), d, total, options.seed);
  const bool grad = options.mode == Mode::GradientEnhanced;

  SampleData data{Eigen::VectorXd(total), grad ? Eigen::MatrixXd(total, d) : Eigen::MatrixXd()};
  parallel_for(static_cast<std::size_t>(total), options.threads, [&](std::size_t p) {
    const auto i = static_cast<Eigen::Index>(p);
    std::vector<double> xi(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) xi[static_cast<std::size_t>(a)] = pts.points(i, a);
    const BvpSolution s = solve_bvp(model, xi);
    data.values(i) = s.qoi;
    if (grad) data.gradients.row(i) = s.gradient.transpose();
  });

  SolveOptions opt;
  opt.opt_tol = options.opt_tol;
  opt.max_iters = options.max_iters;
  Surrogate out;
  if (grad) {
    const GradientDesign g = assemble_gradient_enhanced(basis, pts, data, all_directions(d));
    opt.epsilon = options.epsilon * g.f_tilde.norm();
    out.coefficients = g.coefficients(solve(g.phi_hat, g.f_hat, opt).c);
  } else {
    const StandardDesign sd = assemble_standard(basis, pts, true);
    opt.epsilon = options.epsilon * data.values.norm();
    out.coefficients = solve(sd.matrix, sd.weights.cwiseProduct(data.values), opt).c;
  }
  out.mean = out.coefficients(0);
  out.std = out.coefficients.tail(out.coefficients.size() - 1).norm();
  return out;
}

Table run_bvp_study(const BvpStudyOptions& options) {
  options.model.validate();
  if (options.N_values.empty()) throw std::invalid_argument("run_bvp_study: N_values must be non-empty");
  if (options.modes.empty()) throw std::invalid_argument("run_bvp_study: modes must be non-empty");
  if (options.seeds < 1) throw std::invalid_argument("run_bvp_study: seeds must be >= 1");
  for (int N : options.N_values) {
    if (N < 1) throw std::invalid_argument("run_bvp_study: N_values entries must be >= 1");
  }
  const Moments ref = reference_moments_quadrature(options.model, options.reference_points, options.threads);
  const std::size_t grid = options.N_values.size();
  const auto seeds = static_cast<std::size_t>(options.seeds);
  const std::size_t nm = options.modes.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::array<double, 2>> err(grid * seeds * nm, {inf, inf});
  parallel_for(grid * seeds, options.threads, [&](std::size_t item) {
    const std::size_t g = item / seeds;
    const std::uint64_t stream = split_stream(split_stream(options.seed, g), item % seeds);
    for (std::size_t m = 0; m < nm; ++m) {
      SurrogateOptions so;
      so.n = options.n;
      so.N = options.N_values[g];
      so.mode = options.modes[m];
      so.seed = stream;
      so.epsilon = options.epsilon;
      so.opt_tol = options.opt_tol;
      so.max_iters = options.max_iters;
      so.threads = 1;
      try {
        const Surrogate s = build_surrogate(options.model, so);
        err[item * nm + m] = {std::abs(s.mean - ref.mean), std::abs(s.std - ref.std)};
      } catch (const std::exception&) {
        // an infinite error marks the failed build
      }
    }
  });

  Table t{{"mode", "N", "mean_error", "std_error"}, {}};
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t g = 0; g < grid; ++g) {
      std::vector<double> me, se;
      for (std::size_t r = 0; r < seeds; ++r) {
        me.push_back(err[(g * seeds + r) * nm + m][0]);
        se.push_back(err[(g * seeds + r) * nm + m][1]);
      }
      t.rows.push_back({to_string(options.modes[m]), static_cast<long long>(options.N_values[g]), median(me),
                        median(se)});
    }
  }
  return t;
}

}  // namespace gepce
