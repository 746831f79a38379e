#include "gepce/design.hpp"
#include "gepce/l1solver.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace gepce;

namespace {

Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = n01(rng);
  return a;
}

Eigen::VectorXd sparse_vector(std::mt19937_64& rng, Eigen::Index m, int s) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::normal_distribution<double> n01;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < s; ++k) {
    double v = n01(rng);
    while (std::abs(v) < 0.1) v = n01(rng);
    c(idx[static_cast<std::size_t>(k)]) = v;
  }
  return c;
}

}  // namespace

TEST_CASE("project_l1_ball examples") {
  Eigen::VectorXd inside(3);
  inside << 0.2, -0.3, 0.1;
  CHECK(project_l1_ball(inside, 1.0) == inside);
  CHECK(project_l1_ball(Eigen::Vector2d(3, 0), 1.0) == Eigen::VectorXd(Eigen::Vector2d(1, 0)));
  const Eigen::VectorXd p = project_l1_ball(Eigen::Vector2d(2, 1), 1.0);
  CHECK(p(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p(1) == 0.0);
  CHECK(project_l1_ball(Eigen::Vector2d(2, 1), 0.0).isZero());
  CHECK_THROWS_AS(project_l1_ball(inside, -1.0), std::invalid_argument);
}

TEST_CASE("project_l1_ball satisfies the projection optimality conditions") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tau_dist(0.01, 5.0);
  for (int t = 0; t < 200; ++t) {
    const Eigen::VectorXd v = gaussian_matrix(rng, 12, 1);
    const double tau = tau_dist(rng);
    const Eigen::VectorXd p = project_l1_ball(v, tau);
    CHECK(p.lpNorm<1>() <= tau + 1e-12);
    if (v.lpNorm<1>() <= tau) continue;
    CHECK(p.lpNorm<1>() == doctest::Approx(tau).epsilon(1e-12));
    // v - p = theta * (a subgradient of ||.||_1 at p) with a common theta > 0.
    const Eigen::VectorXd d = v - p;
    const double theta = d.lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (p(i) != 0.0) {
        CHECK(d(i) == doctest::Approx(std::copysign(theta, p(i))).epsilon(1e-12));
      } else {
        CHECK(std::abs(d(i)) <= theta + 1e-12);
      }
    }
    // Any other feasible point is no closer to v.
    const Eigen::VectorXd q = project_l1_ball(p + 0.1 * gaussian_matrix(rng, 12, 1), tau);
    CHECK((v - p).norm() <= (v - q).norm() + 1e-12);
  }
}

TEST_CASE("solve examples") {
  SolveOptions tight;
  tight.opt_tol = 1e-10;
  const auto r1 = solve(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(0, 2, 0), tight);
  CHECK(r1.converged);
  CHECK((r1.c - Eigen::Vector3d(0, 2, 0)).lpNorm<Eigen::Infinity>() <= 1e-8);

  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 0.5, 0, 1, 0.5;
  const auto r2 = solve(a, Eigen::Vector2d(1, 0), tight);
  CHECK(r2.converged);
  CHECK((r2.c - Eigen::Vector3d(1, 0, 0)).lpNorm<Eigen::Infinity>() <= 1e-8);

  const auto r3 = solve(a, Eigen::Vector2d::Zero());
  CHECK(r3.converged);
  CHECK(r3.c.isZero());
  CHECK(r3.iterations == 0);
}

TEST_CASE("epsilon at or above ||b|| returns zero") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  SolveOptions o;
  o.epsilon = 5.0;
  const auto r = solve(a, Eigen::Vector2d(3, 4), o);
  CHECK(r.converged);
  CHECK(r.c.isZero());
}

TEST_CASE("solve errors") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(solve(a, Eigen::Vector3d(1, 1, 1)), std::invalid_argument);
  Eigen::MatrixXd nan = a;
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(solve(nan, Eigen::Vector2d(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(solve(a, Eigen::Vector2d(std::nan(""), 1)), std::invalid_argument);
  Eigen::MatrixXd zero_col = a;
  zero_col.col(1).setZero();
  CHECK_THROWS_AS(solve(zero_col, Eigen::Vector2d(1, 1)), std::invalid_argument);
  SolveOptions neg;
  neg.epsilon = -1.0;
  CHECK_THROWS_AS(solve(a, Eigen::Vector2d(1, 1), neg), std::invalid_argument);
}

TEST_CASE("iteration cap returns the best iterate unconverged") {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd a = gaussian_matrix(rng, 20, 60);
  const Eigen::VectorXd b = a * sparse_vector(rng, 60, 8);
  SolveOptions o;
  o.max_iters = 3;
  const auto r = solve(a, b, o);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.residual_norm < b.norm());
}

TEST_CASE("brute_force_l0 examples") {
  CHECK(brute_force_l0(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(0, 2, 0), 2) ==
        Eigen::VectorXd(Eigen::Vector3d(0, 2, 0)));
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 0.5, 0, 1, 0.5;
  const auto c = brute_force_l0(a, Eigen::Vector2d(1, 0), 1);
  CHECK((c - Eigen::Vector3d(1, 0, 0)).norm() <= 1e-14);
  // Needs two columns.
  CHECK_THROWS_AS(brute_force_l0(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(1, 1, 0), 1), std::runtime_error);
  CHECK_THROWS_AS(brute_force_l0(Eigen::MatrixXd::Ones(3, 21), Eigen::Vector3d(1, 1, 1), 2), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_l0(Eigen::MatrixXd::Ones(3, 3), Eigen::Vector3d(1, 1, 1), 5), std::invalid_argument);
  // Ties between equally sparse supports go to the smaller l1 norm.
  Eigen::MatrixXd t(1, 2);
  t << 1, 2;
  CHECK((brute_force_l0(t, Eigen::VectorXd::Constant(1, 2.0), 1) - Eigen::Vector2d(0, 1)).norm() <= 1e-15);
}

TEST_CASE("basis pursuit matches the l0 oracle when mic < 1/(2s-1)") {
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> m_dist(5, 20);
  std::uniform_int_distribution<int> s_dist(1, 3);
  SolveOptions o;
  o.opt_tol = 1e-10;
  int instances = 0;
  while (instances < 200) {
    const int m = m_dist(rng);
    const int s = std::min(s_dist(rng), m);
    const Eigen::Index rows = 40 + 100 * s;
    const Eigen::MatrixXd a = gaussian_matrix(rng, rows, m);
    if (!recovery_guarantee(mic(a), s)) continue;
    ++instances;
    const Eigen::VectorXd b = a * sparse_vector(rng, m, s);
    const auto bp = solve(a, b, o);
    const auto l0 = brute_force_l0(a, b, s);
    CHECK(bp.converged);
    CHECK((bp.c - l0).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("converged results meet the residual contract; Pareto evaluations decrease") {
  std::mt19937_64 rng(99);
  int converged = 0;
  for (int t = 0; t < 40; ++t) {
    const Eigen::MatrixXd a = gaussian_matrix(rng, 30, 80);
    Eigen::VectorXd b = a * sparse_vector(rng, 80, 5);
    SolveOptions o;
    // Equality-constrained runs get exact sparse data, denoise runs noisy data.
    if (t % 2 == 0) {
      b += 0.01 * gaussian_matrix(rng, 30, 1);
      o.epsilon = 0.05 * b.norm();
    }
    const auto r = solve(a, b, o);
    if (!r.converged) {
      CHECK(r.iterations == o.max_iters);
      continue;
    }
    ++converged;
    CHECK((a * r.c - b).norm() <= o.epsilon + o.opt_tol * b.norm() * (1 + 1e-9));
    CHECK(r.residual_norm == doctest::Approx((a * r.c - b).norm()).epsilon(1e-12));
    auto pts = r.pareto;
    std::stable_sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.tau < y.tau; });
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].phi <= pts[i - 1].phi + o.opt_tol * b.norm());
  }
  CHECK(converged >= 36);
}

TEST_CASE("denoise solution satisfies the optimality certificate") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd a = gaussian_matrix(rng, 25, 50);
    Eigen::VectorXd b = a * sparse_vector(rng, 50, 4) + 0.1 * gaussian_matrix(rng, 25, 1);
    SolveOptions o;
    o.epsilon = 0.2 * b.norm();
    o.opt_tol = 1e-9;
    const auto r = solve(a, b, o);
    REQUIRE(r.converged);
    // Optimal iff A^T r is a positive multiple of a subgradient of ||.||_1 at c.
    const Eigen::VectorXd z = a.transpose() * (b - a * r.c);
    const double scale = z.lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < r.c.size(); ++i) {
      if (std::abs(r.c(i)) > 1e-6) CHECK(z(i) / scale == doctest::Approx(r.c(i) > 0 ? 1.0 : -1.0).epsilon(1e-4));
    }
    CHECK(r.c.lpNorm<1>() <= r.tau_final * (1 + 1e-12));
  }
}

TEST_CASE("basis pursuit is homogeneous in the data") {
  std::mt19937_64 rng(5);
  SolveOptions o;
  o.opt_tol = 1e-11;
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd a = gaussian_matrix(rng, 20, 40);
    const Eigen::VectorXd b = a * sparse_vector(rng, 40, 3);
    const double gamma = std::pow(10.0, static_cast<double>(t % 5) - 2.0);
    const auto r1 = solve(a, b, o);
    const auto r2 = solve(a, gamma * b, o);
    REQUIRE(r1.converged);
    REQUIRE(r2.converged);
    CHECK((r2.c / gamma - r1.c).lpNorm<Eigen::Infinity>() <= 1e-8 * std::max(1.0, r1.c.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("trace export") {
  SolveOptions o;
  o.record_trace = true;
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 0.5, 0, 1, 0.5;
  const auto r = solve(a, Eigen::Vector2d(1, 0), o);
  REQUIRE_FALSE(r.trace.empty());
  std::ostringstream os;
  write_trace_csv(os, r);
  const auto text = os.str();
  CHECK(text.rfind("iteration,tau,residual_norm,duality_gap,step\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(r.trace.size()) + 1);
  CHECK(solve(a, Eigen::Vector2d(1, 0)).trace.empty());
}
