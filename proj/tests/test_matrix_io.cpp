#include "gepce/matrix_io.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace gepce;

TEST_CASE("binary round trip is exact") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(7, 5);
  m(0, 0) = -0.0;
  m(1, 2) = std::numeric_limits<double>::denorm_min();
  m(2, 3) = std::numeric_limits<double>::infinity();
  std::stringstream ss;
  write_matrix_binary(ss, m);
  CHECK(ss.str().size() == 16 + 7 * 5 * 8);
  const auto back = read_matrix_binary(ss);
  CHECK(back == m);
  CHECK(std::signbit(back(0, 0)));
}

TEST_CASE("binary header layout") {
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  std::stringstream ss;
  write_matrix_binary(ss, m);
  const std::string s = ss.str();
  CHECK(s.substr(0, 8) == "GEPCEMAT");
  CHECK(static_cast<unsigned char>(s[8]) == 2);
  CHECK(s[9] == 0);
  CHECK(static_cast<unsigned char>(s[12]) == 3);
  // Row-major: the second stored value is m(0,1) = 2.0 = 0x4000000000000000.
  CHECK(static_cast<unsigned char>(s[16 + 8 + 7]) == 0x40);
  CHECK(s[16 + 8 + 6] == 0);
}

TEST_CASE("binary read errors") {
  std::stringstream bad("NOTAMATRIX______");
  CHECK_THROWS_AS(read_matrix_binary(bad), std::runtime_error);
  std::stringstream ss;
  write_matrix_binary(ss, Eigen::MatrixXd::Ones(3, 3));
  std::stringstream truncated(ss.str().substr(0, 40));
  CHECK_THROWS_AS(read_matrix_binary(truncated), std::runtime_error);
}

TEST_CASE("CSV export") {
  Eigen::MatrixXd m(2, 2);
  m << 0.1, 1, -2.5, 1e-300;
  std::ostringstream os;
  write_matrix_csv(os, m);
  CHECK(os.str() == "0.10000000000000001,1\n-2.5,1e-300\n");
}
