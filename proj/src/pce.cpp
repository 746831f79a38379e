#include "gepce/pce.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gepce {

namespace {

// Appends all k in N_0^dim with |k| == total, descending lexicographic.
void append_compositions(int dim, int total, MultiIndex& prefix, std::vector<MultiIndex>& out) {
  const auto pos = prefix.size();
  if (static_cast<int>(pos) == dim - 1) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int v = total; v >= 0; --v) {
    prefix.push_back(v);
    append_compositions(dim, total - v, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::size_t MultiIndexSet::total_degree_size(int dim, int degree) {
  if (dim < 1 || degree < 0) throw std::invalid_argument("total_degree_size: need dim >= 1, degree >= 0");
  // binomial(dim + degree, degree) built incrementally; each partial product is integral.
  std::size_t result = 1;
  for (int i = 1; i <= degree; ++i) {
    const auto num = static_cast<std::size_t>(dim + i);
    if (result > std::numeric_limits<std::size_t>::max() / num) return std::numeric_limits<std::size_t>::max();
    result = result * num / static_cast<std::size_t>(i);
  }
  return result;
}

MultiIndexSet::MultiIndexSet(int dim, int degree, std::vector<MultiIndex> indices)
    : dim_(dim), degree_(degree), indices_(std::move(indices)) {
  lookup_.reserve(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) lookup_.emplace(key(indices_[i]), i);
}

MultiIndexSet MultiIndexSet::total_degree(int dim, int degree, std::size_t max_size) {
  const std::size_t size = total_degree_size(dim, degree);
  if (size > max_size) {
    throw std::length_error("total-degree set with d=" + std::to_string(dim) + ", n=" + std::to_string(degree) +
                            " exceeds the size cap of " + std::to_string(max_size));
  }
  std::vector<MultiIndex> indices;
  indices.reserve(size);
  MultiIndex prefix;
  prefix.reserve(static_cast<std::size_t>(dim));
  for (int t = 0; t <= degree; ++t) append_compositions(dim, t, prefix, indices);
  return MultiIndexSet(dim, degree, std::move(indices));
}

std::string MultiIndexSet::key(const MultiIndex& k) {
  std::string s;
  for (int v : k) {
    s += std::to_string(v);
    s += ',';
  }
  return s;
}

std::size_t MultiIndexSet::position(const MultiIndex& k) const {
  auto it = lookup_.find(key(k));
  if (it == lookup_.end()) throw std::out_of_range("multi-index not in set");
  return it->second;
}

bool MultiIndexSet::contains(const MultiIndex& k) const { return lookup_.count(key(k)) != 0; }

std::string MultiIndexSet::to_text() const {
  std::ostringstream os;
  for (const auto& k : indices_) {
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (i) os << ' ';
      os << k[i];
    }
    os << '\n';
  }
  return os.str();
}

MultiIndexSet MultiIndexSet::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<MultiIndex> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    MultiIndex k;
    int v = 0;
    while (ls >> v) k.push_back(v);
    if (!ls.eof()) throw std::invalid_argument("from_text: malformed line '" + line + "'");
    rows.push_back(std::move(k));
  }
  if (rows.empty()) throw std::invalid_argument("from_text: empty listing");
  const int dim = static_cast<int>(rows.front().size());
  int degree = 0;
  for (const auto& k : rows) degree = std::max(degree, gepce::total_degree(k));
  auto expected = total_degree(dim, degree);
  if (expected.indices() != rows) {
    throw std::invalid_argument("from_text: listing is not a graded-lex total-degree set");
  }
  return expected;
}

// ---------------------------------------------------------------------------

PceBasis::PceBasis(MultiIndexSet indices, std::vector<PolynomialFamily> families)
    : indices_(std::move(indices)), families_(std::move(families)) {
  if (static_cast<int>(families_.size()) != indices_.dim()) {
    throw std::invalid_argument("PceBasis: need one family per dimension");
  }
  for (auto& f : families_) {
    if (f.is_jacobi() != families_.front().is_jacobi()) {
      throw std::invalid_argument("PceBasis: mixing Jacobi and Hermite families is not supported");
    }
    if (f.max_degree() < indices_.degree()) f = f.with_degree(indices_.degree());
  }
}

PceBasis PceBasis::isotropic(const PolynomialFamily& family, int dim, int degree) {
  return PceBasis(MultiIndexSet::total_degree(dim, degree),
                  std::vector<PolynomialFamily>(static_cast<std::size_t>(dim), family.with_degree(degree)));
}

PceBasis PceBasis::legendre(int dim, int degree) { return isotropic(PolynomialFamily::legendre(degree), dim, degree); }

PceBasis PceBasis::hermite(int dim, int degree) { return isotropic(PolynomialFamily::hermite(degree), dim, degree); }

std::vector<Measure> PceBasis::measures() const {
  std::vector<Measure> out;
  for (const auto& f : families_) out.push_back(f.measure());
  return out;
}

void PceBasis::check_point(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw std::invalid_argument("PceBasis: point dimension mismatch");
}

double PceBasis::eval(const MultiIndex& k, std::span<const double> x) const {
  check_point(x);
  if (!indices_.contains(k)) throw std::out_of_range("PceBasis::eval: index not in set");
  double v = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) v *= families_[i].eval(k[i], x[i]).value;
  return v;
}

double PceBasis::eval_gradient(const MultiIndex& k, std::span<const double> x, int axis) const {
  check_point(x);
  if (axis < 0 || axis >= dim()) throw std::out_of_range("PceBasis::eval_gradient: invalid axis");
  if (!indices_.contains(k)) throw std::out_of_range("PceBasis::eval_gradient: index not in set");
  double v = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const auto pv = families_[i].eval(k[i], x[i]);
    v *= static_cast<int>(i) == axis ? pv.derivative : pv.value;
  }
  return v;
}

void PceBasis::eval_row(std::span<const double> x, std::span<double> values, std::span<double> gradients) const {
  check_point(x);
  const std::size_t m = size();
  const auto d = static_cast<std::size_t>(dim());
  const auto width = static_cast<std::size_t>(degree()) + 1;
  if (values.size() != m) throw std::invalid_argument("PceBasis::eval_row: value span size mismatch");
  const bool want_grad = !gradients.empty();
  if (want_grad && gradients.size() != m * d) {
    throw std::invalid_argument("PceBasis::eval_row: gradient span size mismatch");
  }

  std::vector<double> uni_v(d * width);
  std::vector<double> uni_d(want_grad ? d * width : 0);
  for (std::size_t i = 0; i < d; ++i) {
    std::span<double> vv(uni_v.data() + i * width, width);
    if (want_grad) {
      families_[i].eval_all(x[i], vv, std::span<double>(uni_d.data() + i * width, width));
    } else {
      families_[i].eval_all(x[i], vv);
    }
  }

  for (std::size_t j = 0; j < m; ++j) {
    const auto& k = indices_[j];
    double v = 1.0;
    for (std::size_t i = 0; i < d; ++i) v *= uni_v[i * width + static_cast<std::size_t>(k[i])];
    values[j] = v;
    if (!want_grad) continue;
    for (std::size_t a = 0; a < d; ++a) {
      double g = uni_d[a * width + static_cast<std::size_t>(k[a])];
      for (std::size_t i = 0; i < d && g != 0.0; ++i) {
        if (i != a) g *= uni_v[i * width + static_cast<std::size_t>(k[i])];
      }
      gradients[a * m + j] = g;
    }
  }
}

TensorRule tensor_gauss_quadrature(std::span<const PolynomialFamily> families, int m) {
  const auto d = families.size();
  if (d == 0) throw std::invalid_argument("tensor_gauss_quadrature: no families");
  std::vector<QuadratureRule> rules;
  for (const auto& f : families) rules.push_back(gauss_quadrature(f, m));
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= static_cast<std::size_t>(m);

  TensorRule out;
  out.dim = static_cast<int>(d);
  out.points.resize(total * d);
  out.weights.resize(total);
  std::vector<std::size_t> digit(d, 0);
  for (std::size_t q = 0; q < total; ++q) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      out.points[q * d + i] = rules[i].nodes[digit[i]];
      w *= rules[i].weights[digit[i]];
    }
    out.weights[q] = w;
    for (std::size_t i = d; i-- > 0;) {
      if (++digit[i] < static_cast<std::size_t>(m)) break;
      digit[i] = 0;
    }
  }
  return out;
}

}  // namespace gepce
