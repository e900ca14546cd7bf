#pragma once

// Five-point finite-difference Laplacian with zero ghost cells, and the
// finite-difference Poisson baseline. The discrete system is solved exactly
// through its sine eigenbasis rather than iteratively.

#include <span>
#include <vector>

#include "pddrm/grid.hpp"

namespace pddrm {

/// Exact eigenvalues of the five-point operator on the DST-I grid:
/// mu[n][m] = −(4/h²)(sin²(nπh/2) + sin²(mπh/2)).
class FdEigenTable {
 public:
  explicit FdEigenTable(GridSpec grid);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return mu_; }
  double at(std::size_t n, std::size_t m) const noexcept { return mu_[(n - 1) * grid_.n() + m - 1]; }

 private:
  GridSpec grid_;
  std::vector<double> mu_;
};

ScalarField fd_laplacian(const ScalarField& field);

/// Solves fd_laplacian(u) = f exactly.
ScalarField fd_poisson_solve(const ScalarField& f);

/// f̂ = fd_laplacian(u).
ScalarField fd_inverse_estimate(const ScalarField& u);

}  // namespace pddrm
