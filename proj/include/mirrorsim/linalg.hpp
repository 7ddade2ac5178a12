#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mirrorsim {

/// Row-major dense square matrix, sized for small MNA systems.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

  std::vector<double> multiply(std::span<const double> x) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Gaussian elimination with partial pivoting. Throws SingularMatrix when a
/// pivot falls below n * eps * max|A|.
std::vector<double> solve_dense(DenseMatrix a, std::vector<double> b);

}  // namespace mirrorsim
