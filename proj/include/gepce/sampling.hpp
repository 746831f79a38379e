#pragma once

#include "gepce/polynomials.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace gepce {

/// SplitMix64: a counter-based generator, output_i = mix(key + (i+1) * gamma).
/// Fixed by name so that seeded experiments replay identically everywhere.
/// Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  static constexpr const char* kName = "splitmix64";

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
  /// Uniform integer in [0, n), n >= 1, by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal by the Box-Muller transform (one draw per call).
  double normal();

  static std::uint64_t mix(std::uint64_t z);

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

/// Seed for trial `trial` of an experiment seeded with `seed`. Injective in
/// `trial` for fixed `seed`.
std::uint64_t split_stream(std::uint64_t seed, std::uint64_t trial);

/// N iid points from a product measure, stored N x d.
struct SampleBatch {
  Measure measure;
  Eigen::MatrixXd points;
  std::uint64_t seed = 0;

  Eigen::Index count() const { return points.rows(); }
  int dim() const { return static_cast<int>(points.cols()); }
};

/// Draws N points in d dimensions. Coordinates are filled row by row, each
/// from one uniform (Chebyshev: cos(pi u); uniform: 2u - 1; general Jacobi:
/// inverse CDF by bisection) or a Box-Muller normal.
SampleBatch sample(const Measure& measure, int dim, Eigen::Index count, std::uint64_t seed);

/// Inverse CDF of the Jacobi(alpha, beta) measure on [-1,1] at u in (0,1).
double jacobi_inverse_cdf(const JacobiParams& p, double u);

/// One row per sample, 17 significant digits, header x1,...,xd.
void write_csv(std::ostream& os, const SampleBatch& batch);

}  // namespace gepce
