#include "pddrm/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "pddrm/simd/kernels.hpp"

namespace pddrm {

std::string_view to_string(Space s) {
  switch (s) {
    case Space::Raw: return "raw";
    case Space::USpace: return "u-space";
    case Space::FSpace: return "f-space";
  }
  return "unknown";
}

SpectralCoeffs::SpectralCoeffs(GridSpec grid, Space space, std::vector<double> c)
    : grid_(grid), space_(space), c_(std::move(c)) {
  if (c_.size() != grid_.size())
    throw DimensionError("coefficient matrix has " + std::to_string(c_.size()) +
                         " entries, grid needs " + std::to_string(grid_.size()));
}

SpectralCoeffs SpectralCoeffs::zeros(GridSpec grid, Space space) {
  return SpectralCoeffs(grid, space, std::vector<double>(grid.size(), 0.0));
}

EigenTable::EigenTable(GridSpec grid) : grid_(grid), lambda_(grid.size()) {
  const std::size_t n = grid.n();
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (std::size_t a = 1; a <= n; ++a)
    for (std::size_t b = 1; b <= n; ++b)
      lambda_[(a - 1) * n + b - 1] = -pi2 * static_cast<double>(a * a + b * b);
}

std::shared_ptr<const DstPlan> DstPlan::for_grid(const GridSpec& grid) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const DstPlan>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[grid.n()];
  if (!slot) slot = std::make_shared<const DstPlan>(grid);
  return slot;
}

DstPlan::DstPlan(GridSpec grid) : grid_(grid), sine_(grid.size()) {
  const std::size_t n = grid.n();
  const double np1 = static_cast<double>(n + 1);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      // Reduce k·i mod 2(N+1) first so the argument stays in [0, 2π).
      const std::size_t r = ((k + 1) * (i + 1)) % (2 * (n + 1));
      sine_[k * n + i] = std::sin(std::numbers::pi * static_cast<double>(r) / np1);
    }
}

void DstPlan::forward(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = grid_.n();
  std::vector<double> tmp(n * n);
  simd::gemm(sine_, in, tmp, n, n, n);
  simd::gemm(tmp, sine_, out, n, n, n);
  const double h = grid_.h();
  simd::scale(out, 4.0 * h * h, out);
}

void DstPlan::inverse(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = grid_.n();
  std::vector<double> tmp(n * n);
  simd::gemm(sine_, in, tmp, n, n, n);
  simd::gemm(tmp, sine_, out, n, n, n);
}

SpectralCoeffs dst_forward(const ScalarField& field) {
  std::vector<double> c(field.grid().size());
  DstPlan::for_grid(field.grid())->forward(field.values(), c);
  return SpectralCoeffs(field.grid(), Space::Raw, std::move(c));
}

ScalarField dst_inverse(const SpectralCoeffs& coeffs) {
  std::vector<double> g(coeffs.grid().size());
  DstPlan::for_grid(coeffs.grid())->inverse(coeffs.values(), g);
  return ScalarField(coeffs.grid(), std::move(g));
}

EigenTable eigenvalues(GridSpec grid) { return EigenTable(grid); }

ScalarField sine_mode(GridSpec grid, std::size_t n, std::size_t m) {
  if (n < 1 || m < 1 || n > grid.n() || m > grid.n())
    throw ConfigError("sine_mode: mode out of range");
  auto plan = DstPlan::for_grid(grid);
  const auto s = plan->sine_matrix();
  const std::size_t N = grid.n();
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) v[i * N + j] = s[(n - 1) * N + i] * s[(m - 1) * N + j];
  return ScalarField(grid, std::move(v));
}

namespace {
void require_same(const GridSpec& a, const EigenTable& eig) {
  if (a != eig.grid()) throw DimensionError("eigen table built for a different grid");
}
}  // namespace

SpectralCoeffs to_u_space_from_f(const ScalarField& field_f, const EigenTable& eig) {
  require_same(field_f.grid(), eig);
  std::vector<double> c(field_f.grid().size());
  DstPlan::for_grid(field_f.grid())->forward(field_f.values(), c);
  simd::div(c, eig.values(), c);
  return SpectralCoeffs(field_f.grid(), Space::USpace, std::move(c));
}

SpectralCoeffs to_f_space_from_u(const ScalarField& field_u, const EigenTable& eig) {
  require_same(field_u.grid(), eig);
  std::vector<double> c(field_u.grid().size());
  DstPlan::for_grid(field_u.grid())->forward(field_u.values(), c);
  simd::mul(c, eig.values(), c);
  return SpectralCoeffs(field_u.grid(), Space::FSpace, std::move(c));
}

ScalarField spectral_laplacian(const ScalarField& field, const EigenTable& eig) {
  return dst_inverse(to_f_space_from_u(field, eig));
}

ScalarField spectral_poisson_solve(const ScalarField& f, const EigenTable& eig) {
  return dst_inverse(to_u_space_from_f(f, eig));
}

}  // namespace pddrm
