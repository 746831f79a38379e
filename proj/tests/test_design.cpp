#include "gepce/design.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace gepce;

namespace {

constexpr double kPi = std::numbers::pi;

SampleBatch batch_of(const Measure& m, std::vector<std::vector<double>> rows) {
  SampleBatch b{m, Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size())), 0};
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) b.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return b;
}

double rho_c(double x) { return 1.0 / (kPi * std::sqrt(1.0 - x * x)); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("assemble_standard examples") {
  const auto basis = PceBasis::legendre(1, 1);
  const auto z0 = batch_of(Measure::chebyshev(), {{0.0}});
  const auto plain = assemble_standard(basis, z0, false);
  CHECK(plain.matrix(0, 0) == doctest::Approx(1.0));
  CHECK(plain.matrix(0, 1) == 0.0);
  const auto pre = assemble_standard(basis, z0, true);
  CHECK(pre.matrix(0, 0) == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-14));
  CHECK(pre.matrix(0, 0) == doctest::Approx(1.2533).epsilon(1e-4));
  CHECK(pre.matrix(0, 1) == 0.0);

  const auto cheb = PceBasis::isotropic(PolynomialFamily::chebyshev(4), 2, 4);
  const auto b = sample(Measure::chebyshev(), 2, 50, 3);
  const auto s = assemble_standard(cheb, b, true);
  CHECK((s.weights.array() == 1.0).all());
  CHECK(s.matrix == assemble_standard(cheb, b, false).matrix);
}

TEST_CASE("assemble_standard weights match an independent density ratio") {
  const auto basis = PceBasis::isotropic(PolynomialFamily::jacobi({1.0, 0.5}, 3), 2, 3);
  const auto b = sample(Measure::chebyshev(), 2, 40, 8);
  const auto s = assemble_standard(basis, b, true);
  for (Eigen::Index i = 0; i < b.count(); ++i) {
    double ratio = 1.0;
    for (int a = 0; a < 2; ++a) {
      const double x = b.points(i, a);
      ratio *= oracle::jacobi_density(1.0, 0.5, x) / rho_c(x);
    }
    CHECK(s.weights(i) == doctest::Approx(std::sqrt(ratio)).epsilon(1e-10));
  }
  // Native sampling needs no weights.
  const auto u = sample(Measure::uniform(), 2, 10, 1);
  CHECK((assemble_standard(PceBasis::legendre(2, 3), u, true).weights.array() == 1.0).all());
}

TEST_CASE("assemble_standard errors") {
  const auto gauss = sample(Measure::gaussian(), 2, 5, 1);
  CHECK_THROWS_AS(assemble_standard(PceBasis::legendre(2, 2), gauss, true), std::invalid_argument);
  const auto cheb3 = sample(Measure::chebyshev(), 3, 5, 1);
  CHECK_THROWS_AS(assemble_standard(PceBasis::legendre(2, 2), cheb3, true), std::invalid_argument);
}

TEST_CASE("gradient-enhanced Legendre example at z = 0") {
  const auto basis = PceBasis::legendre(1, 1);
  const auto z0 = batch_of(Measure::chebyshev(), {{0.0}});
  const auto g = assemble_gradient_enhanced(basis, z0, all_directions(1));
  REQUIRE(g.phi_hat.rows() == 2);
  CHECK(g.P(0) == 1.0);
  CHECK(g.P(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.phi_hat(0, 0) == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-14));
  CHECK(g.phi_hat(0, 1) == 0.0);
  CHECK(g.phi_hat(1, 0) == 0.0);
  CHECK(g.phi_hat(1, 1) == doctest::Approx(std::sqrt(3.0) / 2.0 * std::sqrt(3.0 * kPi / 4.0)).epsilon(1e-14));
  CHECK(g.phi_hat(0, 0) == doctest::Approx(1.2533).epsilon(1e-4));
  CHECK(g.phi_hat(1, 1) == doctest::Approx(1.3293).epsilon(1e-4));
}

TEST_CASE("gradient-enhanced Legendre design against a hand-built oracle") {
  const int n = 6;
  const auto basis = PceBasis::legendre(2, n);
  const auto b = sample(Measure::chebyshev(), 2, 15, 21);
  const auto g = assemble_gradient_enhanced(basis, b, all_directions(2));
  const auto m = static_cast<Eigen::Index>(basis.size());
  for (Eigen::Index i = 0; i < b.count(); ++i) {
    const double x = b.points(i, 0), y = b.points(i, 1);
    const double w0 = std::sqrt(oracle::jacobi_density(0, 0, x) * oracle::jacobi_density(0, 0, y) / (rho_c(x) * rho_c(y)));
    const double w1 = std::sqrt(oracle::jacobi_density(1, 1, x) * oracle::jacobi_density(0, 0, y) / (rho_c(x) * rho_c(y)));
    const double w2 = std::sqrt(oracle::jacobi_density(0, 0, x) * oracle::jacobi_density(1, 1, y) / (rho_c(x) * rho_c(y)));
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto& idx = basis.indices()[static_cast<std::size_t>(k)];
      const int a = idx[0], c = idx[1];
      // For Legendre c^2(k, 0, 0) = 3 k (k + 1) / 2.
      const double p = 1.0 / std::sqrt(1.0 + 1.5 * a * (a + 1) + 1.5 * c * (c + 1));
      const double dx = oracle::central_difference([&](double t) { return oracle::legendre(a, t); }, x, 1e-6);
      const double dy = oracle::central_difference([&](double t) { return oracle::legendre(c, t); }, y, 1e-6);
      CHECK(g.P(k) == doctest::Approx(p).epsilon(1e-13));
      CHECK(g.phi_hat(i, k) == doctest::Approx(w0 * oracle::legendre(a, x) * oracle::legendre(c, y) * p).epsilon(1e-10));
      CHECK(g.phi_hat(b.count() + i, k) ==
            doctest::Approx(w1 * dx * oracle::legendre(c, y) * p).epsilon(1e-6).scale(1.0));
      CHECK(g.phi_hat(2 * b.count() + i, k) ==
            doctest::Approx(w2 * oracle::legendre(a, x) * dy * p).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("Hermite gradient design: identity weights and index-sum normaliser") {
  const auto basis = PceBasis::hermite(3, 3);
  const auto b = sample(Measure::gaussian(), 3, 20, 5);
  const auto g = assemble_gradient_enhanced(basis, b, all_directions(3));
  CHECK((g.W.array() == 1.0).all());
  const auto pos = static_cast<Eigen::Index>(basis.indices().position({2, 1, 0}));
  CHECK(g.P(pos) == 0.5);
  const auto h1 = PceBasis::hermite(1, 1);
  const auto z = batch_of(Measure::gaussian(), {{0.7}});
  const auto g1 = assemble_gradient_enhanced(h1, z, all_directions(1));
  CHECK((g1.W.array() == 1.0).all());
  CHECK(g1.phi_hat(1, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("reassembly and weight invariants") {
  for (const auto& fam : {PolynomialFamily::legendre(5), PolynomialFamily::jacobi({2.5, -0.5}, 5), PolynomialFamily::hermite(5)}) {
    const auto basis = PceBasis::isotropic(fam, 3, 5);
    const auto m = fam.is_jacobi() ? Measure::chebyshev() : Measure::gaussian();
    const auto b = sample(m, 3, 30, 17);
    for (const auto& dirs : {std::vector<int>{}, std::vector<int>{1}, all_directions(3)}) {
      const auto g = assemble_gradient_enhanced(basis, b, dirs);
      const Eigen::MatrixXd rebuilt = g.W.asDiagonal() * g.phi_tilde * g.P.asDiagonal();
      CHECK((g.phi_hat - rebuilt).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, g.phi_hat.cwiseAbs().maxCoeff()));
      CHECK(g.W.minCoeff() > 0.0);
      CHECK(g.P.minCoeff() > 0.0);
      CHECK(g.P.maxCoeff() <= 1.0);
      CHECK(g.phi_tilde.topRows(b.count()) == g.phi);
      CHECK(g.blocks() == 1 + static_cast<int>(dirs.size()));
    }
  }
}

TEST_CASE("standard mode is the empty-direction gradient design") {
  const auto basis = PceBasis::legendre(2, 6);
  const auto b = sample(Measure::chebyshev(), 2, 25, 31);
  const auto g = assemble_gradient_enhanced(basis, b, std::vector<int>{});
  const auto s = assemble_standard(basis, b, true);
  CHECK(g.phi_hat == s.matrix);
  CHECK(g.W == s.weights);
}

TEST_CASE("data vector stacking") {
  const auto basis = PceBasis::legendre(2, 2);
  const auto b = sample(Measure::chebyshev(), 2, 4, 2);
  SampleData data{Eigen::VectorXd::LinSpaced(4, 1, 4), Eigen::MatrixXd(4, 2)};
  data.gradients << 10, 20, 11, 21, 12, 22, 13, 23;
  const auto g = assemble_gradient_enhanced(basis, b, data, std::vector<int>{1});
  REQUIRE(g.f_tilde.size() == 8);
  CHECK(g.f_tilde(0) == 1.0);
  CHECK(g.f_tilde(4) == 20.0);
  CHECK(g.f_tilde(7) == 23.0);
  CHECK((g.f_hat - g.W.cwiseProduct(g.f_tilde)).norm() == 0.0);
  CHECK(g.coefficients(Eigen::VectorXd::Ones(6)) == g.P);
}

TEST_CASE("gradient assembly errors") {
  const auto basis = PceBasis::legendre(2, 2);
  const auto uni = sample(Measure::uniform(), 2, 4, 2);
  CHECK_THROWS_AS(assemble_gradient_enhanced(basis, uni, all_directions(2)), std::invalid_argument);
  const auto cheb = sample(Measure::chebyshev(), 2, 4, 2);
  CHECK_THROWS_AS(assemble_gradient_enhanced(PceBasis::hermite(2, 2), cheb, all_directions(2)), std::invalid_argument);
  SampleData values_only{Eigen::VectorXd::Ones(4), {}};
  CHECK_THROWS_AS(assemble_gradient_enhanced(basis, cheb, values_only), std::invalid_argument);
  SampleData short_values{Eigen::VectorXd::Ones(3), Eigen::MatrixXd::Ones(4, 2)};
  CHECK_THROWS_AS(assemble_gradient_enhanced(basis, cheb, short_values), std::invalid_argument);
  CHECK_THROWS_AS(assemble_gradient_enhanced(basis, cheb, std::vector<int>{2}), std::invalid_argument);
  CHECK_THROWS_AS(assemble_gradient_enhanced(basis, cheb, std::vector<int>{0, 0}), std::invalid_argument);
  CHECK_NOTHROW(assemble_gradient_enhanced(basis, cheb, values_only, std::vector<int>{}));
}

TEST_CASE("assembly is independent of thread count") {
  const auto basis = PceBasis::legendre(3, 5);
  const auto b = sample(Measure::chebyshev(), 3, 101, 4);
  const auto g1 = assemble_gradient_enhanced(basis, b, all_directions(3), 1);
  const auto g4 = assemble_gradient_enhanced(basis, b, all_directions(3), 4);
  CHECK(g1.phi_hat == g4.phi_hat);
  CHECK(assemble_standard(basis, b, true, 1).matrix == assemble_standard(basis, b, true, 3).matrix);
}

TEST_CASE("mic examples") {
  CHECK(mic(Eigen::MatrixXd::Identity(4, 4)) == 0.0);
  Eigen::MatrixXd twin(3, 2);
  twin << 1, 1, 2, 2, -1, -1;
  CHECK(mic(twin) == doctest::Approx(1.0).epsilon(1e-15));
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 0, 1;
  CHECK(mic(a) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  Eigen::MatrixXd zero = Eigen::MatrixXd::Ones(3, 3);
  zero.col(1).setZero();
  CHECK_THROWS_AS(mic(zero), std::invalid_argument);
  CHECK_THROWS_AS(mic(Eigen::MatrixXd::Ones(3, 1)), std::invalid_argument);
}

TEST_CASE("mic is invariant under positive column scaling") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(0.1, 10.0);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Random(12, 8);
    Eigen::VectorXd d(8);
    for (auto& v : d) v = pos(rng);
    CHECK(std::abs(mic(a * d.asDiagonal()) - mic(a)) <= 1e-12);
  }
}

TEST_CASE("mic of a Chebyshev value block equals mic of phi") {
  const auto basis = PceBasis::isotropic(PolynomialFamily::chebyshev(6), 2, 6);
  const auto b = sample(Measure::chebyshev(), 2, 40, 12);
  const auto g = assemble_gradient_enhanced(basis, b, all_directions(2));
  CHECK(std::abs(mic(g.block(g.phi_hat, 0)) - mic(g.phi)) <= 1e-14);
}

TEST_CASE("recovery_guarantee examples") {
  CHECK(recovery_guarantee(0.0, 1));
  CHECK(recovery_guarantee(0.0, 50));
  CHECK_FALSE(recovery_guarantee(0.2, 3));
  CHECK(recovery_guarantee(0.1, 5));
  CHECK_FALSE(recovery_guarantee(0.12, 5));
  CHECK_THROWS_AS(recovery_guarantee(0.1, 0), std::invalid_argument);
}

TEST_CASE("coherence constants") {
  CHECK(coherence_constant(PceBasis::isotropic(PolynomialFamily::chebyshev(3), 2, 3), all_directions(2)) == 1.0);
  CHECK(coherence_constant(PceBasis::legendre(2, 3), all_directions(2)) == 1.0 + std::sqrt(2.0) / 2.0);
  CHECK(coherence_bound(PceBasis::legendre(2, 3)) == doctest::Approx(std::pow(4.0 * std::numbers::e, 2)).epsilon(1e-15));
  const auto b = sample(Measure::chebyshev(), 2, 30, 2);
  const auto basis = PceBasis::legendre(2, 4);
  const auto r = coherence_params(basis, assemble_gradient_enhanced(basis, b, all_directions(2)));
  CHECK(r.mic >= 0.0);
  CHECK(r.mic <= 1.0);
  CHECK(r.mu_L > 0.0);
  CHECK(r.beta_L > 0.0);
  CHECK(r.beta_L <= r.beta_bound());
  CHECK(r.mu_L <= r.theorem_bound);
  const auto rs = coherence_params(basis, assemble_standard(basis, b, true));
  CHECK(rs.mu_L == doctest::Approx(r.mu_L).epsilon(1e-14));
}

TEST_CASE("d=1 Legendre beta_L on a dense grid stays below 4e C") {
  const auto basis = PceBasis::legendre(1, 50);
  const auto scan = coherence_grid_scan(basis, 2001, all_directions(1));
  const double bound = 4.0 * std::numbers::e * (1.0 + std::sqrt(2.0) / 2.0);
  CHECK(bound == doctest::Approx(18.56).epsilon(1e-3));
  CHECK(scan.beta_L <= bound);
  CHECK(scan.mu_L <= 4.0 * std::numbers::e);
}

TEST_CASE("grid beta_L never exceeds the coherence bound") {
  const std::vector<double> params = {-0.5, 0.0, 0.5, 1.0};
  for (double a : params) {
    for (double b : params) {
      // beta_L at degree 20 bounds every lower degree, since the index sets nest.
      const auto fam = PolynomialFamily::jacobi({a, b}, 20);
      const auto b1 = PceBasis::isotropic(fam, 1, 20);
      const auto s1 = coherence_grid_scan(b1, 2001, all_directions(1));
      CHECK(s1.beta_L <= coherence_constant(b1, all_directions(1)) * coherence_bound(b1));
      const auto b2 = PceBasis::isotropic(fam, 2, 20);
      const auto s2 = coherence_grid_scan(b2, 201, all_directions(2));
      CHECK(s2.beta_L <= coherence_constant(b2, all_directions(2)) * coherence_bound(b2));
      CHECK(s2.mu_L <= coherence_bound(b2));
    }
  }
}

TEST_CASE("isotropy by quadrature") {
  CHECK(isotropy_gap_quadrature(PceBasis::legendre(1, 3), all_directions(1)) <= 1e-10);
  CHECK(isotropy_gap_quadrature(PceBasis::hermite(2, 3), all_directions(2)) <= 1e-10);
  CHECK(isotropy_gap_quadrature(PceBasis::legendre(2, 5), all_directions(2)) <= 1e-10);
  CHECK(isotropy_gap_quadrature(PceBasis::isotropic(PolynomialFamily::jacobi({2.5, 1.0}, 4), 3, 4), {0, 2}) <= 1e-10);
  CHECK_THROWS_AS(isotropy_gap_quadrature(PceBasis::legendre(5, 1), all_directions(5)), std::invalid_argument);
}

TEST_CASE("isotropy by Monte Carlo stays inside the CLT envelope") {
  const auto est = isotropy_gap_monte_carlo(PceBasis::legendre(2, 5), 1'000'000, 2024, all_directions(2));
  CHECK(est.max_z <= 5.0);
  CHECK(est.gap <= 5.0 * est.standard_error.maxCoeff());
}

TEST_CASE("squared column norms average to one") {
  const auto basis = PceBasis::legendre(2, 3);
  const auto est = isotropy_gap_monte_carlo(basis, 100'000, 77, all_directions(2));
  for (Eigen::Index k = 0; k < est.mean.rows(); ++k) {
    CHECK(std::abs(est.mean(k, k) - 1.0) <= 3.0 * est.standard_error(k, k));
  }
  const auto b = sample(Measure::chebyshev(), 2, 2000, 1);
  const auto g = assemble_gradient_enhanced(basis, b, all_directions(2));
  CHECK(isotropy_gap(g) < 0.5);
}

TEST_CASE("nullspace containment") {
  SUBCASE("overdetermined full-rank design is vacuous") {
    const auto basis = PceBasis::legendre(2, 3);
    const auto g = assemble_gradient_enhanced(basis, sample(Measure::chebyshev(), 2, 10, 1), all_directions(2));
    const auto r = nullspace_containment(g, 1e-10);
    CHECK(r.contained);
    CHECK(r.nullity_phi_hat == 0);
  }
  SUBCASE("under-sampled Legendre-Chebyshev design") {
    const auto basis = PceBasis::legendre(2, 10);
    const auto g = assemble_gradient_enhanced(basis, sample(Measure::chebyshev(), 2, 10, 6), all_directions(2));
    const auto r = nullspace_containment(g, 1e-10);
    CHECK(r.contained);
    CHECK(r.nullity_phi == 56);
    CHECK(r.nullity_phi_hat == 36);
    CHECK(r.strict());
  }
  SUBCASE("unrelated rows") {
    const Eigen::MatrixXd phi = Eigen::MatrixXd::Random(3, 8);
    const Eigen::MatrixXd hat = Eigen::MatrixXd::Random(5, 8);
    CHECK_FALSE(nullspace_containment(phi, hat, 1e-10).contained);
  }
  CHECK_THROWS_AS(nullspace_containment(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(2, 4), 1e-10),
                  std::invalid_argument);
}

TEST_CASE("preconditioning lowers the median MIC") {
  const auto basis = PceBasis::legendre(2, 30);
  for (Eigen::Index n : {50, 100, 200, 400}) {
    std::vector<double> hat, tilde;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto g = assemble_gradient_enhanced(basis, sample(Measure::chebyshev(), 2, n, split_stream(5, seed)),
                                                all_directions(2));
      hat.push_back(mic(g.phi_hat));
      tilde.push_back(mic(g.phi_tilde));
    }
    CHECK(median(hat) < median(tilde));
  }
}
