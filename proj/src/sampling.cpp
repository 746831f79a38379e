#include "gepce/sampling.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace gepce {

std::uint64_t SplitMix64::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("SplitMix64::below: empty range");
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t v = 0;
  do {
    v = (*this)();
  } while (v >= limit);
  return v % n;
}

double SplitMix64::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t split_stream(std::uint64_t seed, std::uint64_t trial) {
  // mix is a bijection, so for fixed seed the map trial -> result is injective.
  return SplitMix64::mix(seed ^ SplitMix64::mix(trial + 0x632be59bd9b4e019ULL));
}

double jacobi_inverse_cdf(const JacobiParams& p, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("jacobi_inverse_cdf: u must lie in (0,1)");
  // x = 2B - 1 with B ~ Beta(beta + 1, alpha + 1).
  const double a = p.beta() + 1.0;
  const double b = p.alpha() + 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (boost::math::ibeta(a, b, mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 2.0 * (0.5 * (lo + hi)) - 1.0;
}

SampleBatch sample(const Measure& measure, int dim, Eigen::Index count, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("sample: dimension must be >= 1");
  if (count < 1) throw std::invalid_argument("sample: need at least one point");
  SampleBatch batch{measure, Eigen::MatrixXd(count, dim), seed};
  SplitMix64 rng(seed);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (int j = 0; j < dim; ++j) {
      double z = 0.0;
      if (measure.kind() == Measure::Kind::Gaussian) {
        z = rng.normal();
      } else if (measure.is_chebyshev()) {
        z = std::cos(std::numbers::pi * rng.uniform_open());
      } else if (measure.is_uniform()) {
        z = 2.0 * rng.uniform_open() - 1.0;
      } else {
        z = jacobi_inverse_cdf(measure.params(), rng.uniform_open());
      }
      batch.points(i, j) = z;
    }
  }
  return batch;
}

void write_csv(std::ostream& os, const SampleBatch& batch) {
  for (int j = 0; j < batch.dim(); ++j) os << (j ? ",x" : "x") << (j + 1);
  os << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < batch.count(); ++i) {
    for (int j = 0; j < batch.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", batch.points(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace gepce
