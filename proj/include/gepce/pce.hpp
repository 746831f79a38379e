#pragma once

#include "gepce/polynomials.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gepce {

using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& k) {
  int s = 0;
  for (int v : k) s += v;
  return s;
}

/// Total-degree multi-index set {k in N_0^d : |k| <= n} in graded
/// lexicographic order: ascending |k|, and within one degree descending
/// lexicographic order, so (1,0) precedes (0,1). The zero index is first.
class MultiIndexSet {
 public:
  static constexpr std::size_t kDefaultMaxSize = 2'000'000;

  static MultiIndexSet total_degree(int dim, int degree, std::size_t max_size = kDefaultMaxSize);

  /// binomial(dim + degree, degree), or SIZE_MAX on overflow.
  static std::size_t total_degree_size(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  /// Position of k in the ordering; throws std::out_of_range if absent.
  std::size_t position(const MultiIndex& k) const;
  bool contains(const MultiIndex& k) const;

  /// One index per line, components separated by single spaces.
  std::string to_text() const;
  /// Parses to_text output; checks it is a complete total-degree set in order.
  static MultiIndexSet from_text(const std::string& text);

 private:
  MultiIndexSet(int dim, int degree, std::vector<MultiIndex> indices);
  static std::string key(const MultiIndex& k);

  int dim_;
  int degree_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// Tensor-product orthonormal basis psi_k(x) = prod_i phi^i_{k_i}(x_i).
class PceBasis {
 public:
  PceBasis(MultiIndexSet indices, std::vector<PolynomialFamily> families);

  /// Same family in every direction.
  static PceBasis isotropic(const PolynomialFamily& family, int dim, int degree);
  static PceBasis legendre(int dim, int degree);
  static PceBasis hermite(int dim, int degree);

  int dim() const { return indices_.dim(); }
  int degree() const { return indices_.degree(); }
  std::size_t size() const { return indices_.size(); }
  const MultiIndexSet& indices() const { return indices_; }
  const PolynomialFamily& family(int axis) const { return families_.at(static_cast<std::size_t>(axis)); }
  bool is_jacobi() const { return families_.front().is_jacobi(); }
  bool is_hermite() const { return !is_jacobi(); }

  /// Product measure the basis is orthonormal under.
  std::vector<Measure> measures() const;

  double eval(const MultiIndex& k, std::span<const double> x) const;
  /// d psi_k / d x_axis, axis in [0, dim).
  double eval_gradient(const MultiIndex& k, std::span<const double> x, int axis) const;

  /// All basis values at x into `values` (size M). When `gradients` is
  /// non-empty it receives dim blocks of M partial derivatives,
  /// gradients[axis * M + j] = d psi_j / d x_axis.
  void eval_row(std::span<const double> x, std::span<double> values, std::span<double> gradients = {}) const;

 private:
  void check_point(std::span<const double> x) const;

  MultiIndexSet indices_;
  std::vector<PolynomialFamily> families_;
};

/// Tensor-product Gauss rule: points are stored row-major (point q occupies
/// points[q*dim .. q*dim+dim)).
struct TensorRule {
  int dim = 0;
  std::vector<double> points;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t q) const {
    return {points.data() + q * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// m nodes per axis from each family's own Gauss rule.
TensorRule tensor_gauss_quadrature(std::span<const PolynomialFamily> families, int m);

}  // namespace gepce
