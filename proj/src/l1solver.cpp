#include "gepce/l1solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace gepce {

namespace {

constexpr double kStepMin = 1e-12;
constexpr double kStepMax = 1e12;
constexpr double kArmijo = 1e-4;
constexpr int kWindow = 10;
constexpr int kMaxBacktracks = 30;

void validate(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SolveOptions& o) {
  if (A.rows() != b.size()) throw std::invalid_argument("solve: A and b have different row counts");
  if (A.cols() == 0) throw std::invalid_argument("solve: A has no columns");
  if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("solve: NaN or infinity in A or b");
  if (!(o.epsilon >= 0.0)) throw std::invalid_argument("solve: epsilon must be >= 0");
  if (!(o.opt_tol > 0.0)) throw std::invalid_argument("solve: opt_tol must be > 0");
  if (o.max_iters < 1) throw std::invalid_argument("solve: max_iters must be >= 1");
  for (Eigen::Index k = 0; k < A.cols(); ++k) {
    if ((A.col(k).array() == 0.0).all()) throw std::invalid_argument("solve: A has an all-zero column");
  }
}

// Active-set polish on the face of the tau-ball that holds x: with support
// and signs fixed, minimize ||A y - b|| subject to sum z_j y_j <= tau. When
// the fit leaves the face, step to the first zero crossing, drop that
// coefficient and refit. Returns false when the support has more columns
// than rows or nothing improves.
bool subspace_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tau, double f, Eigen::VectorXd& x) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) support.push_back(i);
  }
  if (support.empty() || static_cast<Eigen::Index>(support.size()) > A.rows()) return false;
  Eigen::VectorXd work = x;
  while (!support.empty()) {
    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd As(A.rows(), k);
    Eigen::VectorXd z(k), xs(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::Index col = support[static_cast<std::size_t>(j)];
      As.col(j) = A.col(col);
      xs(j) = work(col);
      z(j) = xs(j) > 0.0 ? 1.0 : -1.0;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    if (qr.rank() < k) break;
    Eigen::VectorXd y = qr.solve(b);
    if (z.dot(y) > tau) {
      const Eigen::VectorXd qz = (As.transpose() * As).ldlt().solve(z);
      y -= qz * ((z.dot(y) - tau) / z.dot(qz));
    }
    // The objective decreases monotonically from xs to y.
    double t = 1.0;
    Eigen::Index hit = -1;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (y(j) * z(j) <= 0.0) {
        const double tj = xs(j) / (xs(j) - y(j));
        if (tj < t) {
          t = tj;
          hit = j;
        }
      }
    }
    for (Eigen::Index j = 0; j < k; ++j) work(support[static_cast<std::size_t>(j)]) = xs(j) + t * (y(j) - xs(j));
    if (hit < 0) break;
    work(support[static_cast<std::size_t>(hit)]) = 0.0;
    support.erase(support.begin() + hit);
  }
  if (!(0.5 * (A * work - b).squaredNorm() < f)) return false;
  x = work;
  return true;
}

}  // namespace

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("project_l1_ball: tau must be >= 0");
  if (tau == 0.0) return Eigen::VectorXd::Zero(v.size());
  if (v.lpNorm<1>() <= tau) return v;
  std::vector<double> u(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) u[static_cast<std::size_t>(i)] = std::abs(v(i));
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - tau) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::max(std::abs(v(i)) - theta, 0.0);
    out(i) = std::copysign(mag, v(i));
  }
  return out;
}

RecoveryResult solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SolveOptions& options) {
  validate(A, b, options);
  const Eigen::Index m = A.cols();
  const double sigma = options.epsilon;
  const double b_norm = b.norm();
  RecoveryResult res;
  res.c = Eigen::VectorXd::Zero(m);
  res.residual_norm = b_norm;
  if (b_norm <= sigma) {
    res.converged = true;
    return res;
  }
  const double tol = options.opt_tol * b_norm;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd Ax = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd g = -(A.transpose() * r);
  double f = 0.5 * r.squaredNorm();
  double tau = 0.0;
  double tau_lo = 0.0;
  double tau_hi = std::numeric_limits<double>::infinity();
  double step = 1.0;
  bool step_unset = true;
  bool force_tau = false;
  std::array<double, kWindow> last_f;
  last_f.fill(-std::numeric_limits<double>::infinity());
  last_f[0] = f;

  Eigen::VectorXd best = x;
  double best_mismatch = std::abs(b_norm - sigma);

  Eigen::VectorXd dx(m), Adx(b.size()), xn(m), Axn(b.size()), rn(b.size()), gn(m);
  bool face_tried = false;
  int iter = 0;
  for (;; ++iter) {
    const double r_norm = std::sqrt(2.0 * f);
    const double g_norm = g.lpNorm<Eigen::Infinity>();
    const double gap = r.dot(r - b) + tau * g_norm;
    const double mismatch = std::abs(r_norm - sigma);
    if (mismatch < best_mismatch) {
      best_mismatch = mismatch;
      best = x;
    }
    if (options.record_trace) res.trace.push_back({iter, tau, r_norm, gap, step});
    if (mismatch <= tol) {
      res.converged = true;
      best = x;
      break;
    }
    if (iter >= options.max_iters) break;

    // Update tau once the inner solve is accurate enough: either relative to
    // the distance from the root, or to a relative duality gap of opt_tol.
    // phi(tau)^2 >= r_norm^2 - 2 gap, so the Newton step overshoots the exact
    // one by at most 2 gap / g_norm <= 2 opt_tol tau.
    if (force_tau || gap <= std::max(0.01 * r_norm * mismatch, options.opt_tol * tau * g_norm)) {
      force_tau = false;
      if (g_norm == 0.0) break;  // b is orthogonal to the range of A: epsilon is unreachable
      res.pareto.push_back({tau, r_norm});
      if (r_norm > sigma) {
        tau_lo = std::max(tau_lo, tau);
      } else {
        tau_hi = std::min(tau_hi, tau);
      }
      double tau_new = tau + r_norm * (r_norm - sigma) / g_norm;
      if (!(tau_new > tau_lo && tau_new < tau_hi)) {
        tau_new = std::isfinite(tau_hi) ? 0.5 * (tau_lo + tau_hi) : std::max(tau_new, tau_lo);
      }
      if (tau_new < tau) {
        x = project_l1_ball(x, tau_new);
        Ax.noalias() = A * x;
        r = b - Ax;
        g.noalias() = -(A.transpose() * r);
        f = 0.5 * r.squaredNorm();
      }
      tau = tau_new;
      face_tried = false;
      last_f.fill(-std::numeric_limits<double>::infinity());
      last_f[0] = f;
    }

    if (step_unset) {
      const double probe = (project_l1_ball(x - g, tau) - x).lpNorm<Eigen::Infinity>();
      step = probe > 0.0 ? std::clamp(1.0 / probe, kStepMin, 1.0) : 1.0;
      step_unset = false;
    }

    dx = project_l1_ball(x - step * g, tau) - x;
    const double gtd = g.dot(dx);
    if (!(gtd < 0.0)) {
      // x is stationary for this radius up to rounding.
      force_tau = true;
      continue;
    }
    Adx.noalias() = A * dx;
    const double f_max = *std::max_element(last_f.begin(), last_f.end());
    double alpha = 1.0;
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < kMaxBacktracks; ++ls) {
      Axn = Ax + alpha * Adx;
      rn = b - Axn;
      fn = 0.5 * rn.squaredNorm();
      if (fn <= f_max + kArmijo * alpha * gtd) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted && !(fn < f)) {
      step = 1.0;
      step_unset = true;
      force_tau = true;
      continue;
    }
    xn = x + alpha * dx;
    gn.noalias() = -(A.transpose() * rn);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = gn - g;
    const double sts = s.squaredNorm();
    const double sty = s.dot(y);
    step = sty <= 0.0 ? kStepMax : std::clamp(sts / sty, kStepMin, kStepMax);
    x.swap(xn);
    Ax.swap(Axn);
    r.swap(rn);
    g.swap(gn);
    f = fn;
    last_f[static_cast<std::size_t>(iter % kWindow)] = f;

    // Once the support settles, jump to the best point on its face.
    if (((x.array() != 0.0) != (xn.array() != 0.0)).any()) {
      face_tried = false;
    } else if (!face_tried) {
      face_tried = true;
      if (subspace_step(A, b, tau, f, x)) {
        Ax.noalias() = A * x;
        r = b - Ax;
        g.noalias() = -(A.transpose() * r);
        f = 0.5 * r.squaredNorm();
        last_f.fill(-std::numeric_limits<double>::infinity());
        last_f[0] = f;
      }
    }
  }

  res.c = best;
  res.residual_norm = (A * best - b).norm();
  res.iterations = iter;
  res.tau_final = tau;
  return res;
}

Eigen::VectorXd brute_force_l0(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int s_max) {
  const Eigen::Index m = A.cols();
  if (m > 20) throw std::invalid_argument("brute_force_l0: at most 20 columns");
  if (s_max < 0 || s_max > 4) throw std::invalid_argument("brute_force_l0: s_max must lie in [0, 4]");
  if (A.rows() != b.size()) throw std::invalid_argument("brute_force_l0: A and b have different row counts");
  const double tol = 1e-10 * std::max(1.0, b.norm());
  if (b.norm() <= tol) return Eigen::VectorXd::Zero(m);

  for (int s = 1; s <= std::min<Eigen::Index>(s_max, m); ++s) {
    Eigen::VectorXd best;
    double best_l1 = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> support(static_cast<std::size_t>(s));
    std::iota(support.begin(), support.end(), Eigen::Index{0});
    while (true) {
      Eigen::MatrixXd sub(A.rows(), s);
      for (int j = 0; j < s; ++j) sub.col(j) = A.col(support[static_cast<std::size_t>(j)]);
      const Eigen::VectorXd coef = sub.colPivHouseholderQr().solve(b);
      if ((sub * coef - b).norm() <= tol && coef.lpNorm<1>() < best_l1) {
        best_l1 = coef.lpNorm<1>();
        best = Eigen::VectorXd::Zero(m);
        for (int j = 0; j < s; ++j) best(support[static_cast<std::size_t>(j)]) = coef(j);
      }
      // Next combination in lexicographic order.
      int i = s - 1;
      while (i >= 0 && support[static_cast<std::size_t>(i)] == m - s + i) --i;
      if (i < 0) break;
      ++support[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < s; ++j) support[static_cast<std::size_t>(j)] = support[static_cast<std::size_t>(j - 1)] + 1;
    }
    if (best.size() != 0) return best;
  }
  throw std::runtime_error("brute_force_l0: no support of size <= " + std::to_string(s_max) + " fits b");
}

void write_trace_csv(std::ostream& os, const RecoveryResult& result) {
  os << "iteration,tau,residual_norm,duality_gap,step\n";
  char buf[160];
  for (const auto& t : result.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", t.iteration, t.tau, t.residual_norm, t.duality_gap,
                  t.step);
    os << buf;
  }
}

}  // namespace gepce
