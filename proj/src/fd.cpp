#include "pddrm/fd.hpp"

#include <cmath>
#include <numbers>

#include "pddrm/simd/kernels.hpp"
#include "pddrm/spectral.hpp"

namespace pddrm {

FdEigenTable::FdEigenTable(GridSpec grid) : grid_(grid), mu_(grid.size()) {
  const std::size_t n = grid.n();
  const double h = grid.h();
  std::vector<double> axis(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double s = std::sin(static_cast<double>(k) * std::numbers::pi * h / 2.0);
    axis[k - 1] = -(4.0 / (h * h)) * s * s;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) mu_[a * n + b] = axis[a] + axis[b];
}

ScalarField fd_laplacian(const ScalarField& field) {
  const double h = field.grid().h();
  std::vector<double> out(field.grid().size());
  simd::five_point(field.values(), out, field.n(), 1.0 / (h * h));
  return ScalarField(field.grid(), std::move(out));
}

ScalarField fd_poisson_solve(const ScalarField& f) {
  const FdEigenTable mu(f.grid());
  auto plan = DstPlan::for_grid(f.grid());
  std::vector<double> c(f.grid().size());
  plan->forward(f.values(), c);
  simd::div(c, mu.values(), c);
  plan->inverse(c, c);
  return ScalarField(f.grid(), std::move(c));
}

ScalarField fd_inverse_estimate(const ScalarField& u) { return fd_laplacian(u); }

}  // namespace pddrm
