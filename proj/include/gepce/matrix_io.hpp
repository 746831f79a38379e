#pragma once

// Dense matrix export. Binary layout: 8-byte magic "GEPCEMAT", uint32 rows,
// uint32 cols (little-endian), then rows*cols little-endian float64 values in
// row-major order.

#include <Eigen/Core>

#include <iosfwd>
#include <string>

namespace gepce {

inline constexpr char kMatrixMagic[8] = {'G', 'E', 'P', 'C', 'E', 'M', 'A', 'T'};

void write_matrix_binary(std::ostream& os, const Eigen::MatrixXd& m);
void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m);
/// Throws std::runtime_error on a bad magic or a truncated stream.
Eigen::MatrixXd read_matrix_binary(std::istream& is);
Eigen::MatrixXd read_matrix_binary(const std::string& path);

/// Comma-separated rows with 17 significant digits, no header.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

}  // namespace gepce
