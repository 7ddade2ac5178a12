#include <cmath>
#include <random>

#include "doctest.h"
#include "mirrorsim/error.hpp"
#include "mirrorsim/linalg.hpp"

using namespace mirrorsim;

TEST_CASE("solve a small system") {
  DenseMatrix a(3);
  const double values[3][3] = {{2, 1, -1}, {-3, -1, 2}, {-2, 1, 2}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = values[i][j];
  }
  const auto x = solve_dense(a, {8, -11, -3});
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(3.0));
  CHECK(x[2] == doctest::Approx(-1.0));
}

TEST_CASE("pivoting handles a zero leading diagonal") {
  DenseMatrix a(2);
  a(0, 1) = 1.0;
  a(1, 0) = 1.0;
  const auto x = solve_dense(a, {3.0, 4.0});
  CHECK(x[0] == doctest::Approx(4.0));
  CHECK(x[1] == doctest::Approx(3.0));
}

TEST_CASE("singular matrices are rejected") {
  DenseMatrix a(2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 4.0;
  CHECK_THROWS_AS(solve_dense(a, {1.0, 2.0}), SingularMatrix);
  CHECK_THROWS_AS(solve_dense(DenseMatrix(3), {0.0, 0.0, 0.0}), SingularMatrix);
}

TEST_CASE("random diagonally dominant systems have small residuals") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 12;
    DenseMatrix a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = u(rng);
      for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng);
      a(i, i) += static_cast<double>(n);
    }
    const auto x = solve_dense(a, b);
    const auto ax = a.multiply(x);
    for (std::size_t i = 0; i < n; ++i) CHECK(ax[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}
