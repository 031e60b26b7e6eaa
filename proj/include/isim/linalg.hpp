#pragma once

// Dense LU with partial pivoting. Circuit matrices here are tiny (<= ~20
// unknowns); no sparsity machinery.

#include <stdexcept>
#include <vector>

namespace isim {

struct Matrix {
  int n = 0;
  std::vector<double> a;  // row-major n x n

  explicit Matrix(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}
  double& operator()(int r, int c) { return a[static_cast<size_t>(r) * n + c]; }
  double operator()(int r, int c) const { return a[static_cast<size_t>(r) * n + c]; }
};

struct SingularMatrixError : std::runtime_error {
  int row;
  explicit SingularMatrixError(int row_)
      : std::runtime_error("singular matrix at pivot row " + std::to_string(row_)),
        row(row_) {}
};

// Solves a*x = b, factorizing in place. Pivot magnitudes below 1e-13 are
// treated as singular.
std::vector<double> lu_solve(Matrix a, std::vector<double> b);

}  // namespace isim
