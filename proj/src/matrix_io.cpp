#include "gepce/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace gepce {

namespace {

template <class U>
void put_le(std::ostream& os, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes.data(), bytes.size());
}

template <class U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw std::runtime_error("read_matrix_binary: truncated stream");
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_matrix_binary(std::ostream& os, const Eigen::MatrixXd& m) {
  constexpr auto cap = std::numeric_limits<std::uint32_t>::max();
  if (static_cast<std::uint64_t>(m.rows()) > cap || static_cast<std::uint64_t>(m.cols()) > cap) {
    throw std::length_error("write_matrix_binary: dimension exceeds 32 bits");
  }
  os.write(kMatrixMagic, sizeof kMatrixMagic);
  put_le(os, static_cast<std::uint32_t>(m.rows()));
  put_le(os, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_le(os, std::bit_cast<std::uint64_t>(m(i, j)));
  if (!os) throw std::runtime_error("write_matrix_binary: write failed");
}

void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_matrix_binary: cannot open " + path);
  write_matrix_binary(os, m);
}

Eigen::MatrixXd read_matrix_binary(std::istream& is) {
  char magic[sizeof kMatrixMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMatrixMagic, sizeof magic) != 0) {
    throw std::runtime_error("read_matrix_binary: bad magic");
  }
  const auto rows = get_le<std::uint32_t>(is);
  const auto cols = get_le<std::uint32_t>(is);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = std::bit_cast<double>(get_le<std::uint64_t>(is));
  return m;
}

Eigen::MatrixXd read_matrix_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_matrix_binary: cannot open " + path);
  return read_matrix_binary(is);
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  char buf[40];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace gepce
