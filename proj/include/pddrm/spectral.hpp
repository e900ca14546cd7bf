#pragma once

// Sine-basis machinery for the Dirichlet Laplacian on the unit square.
//
// Basis functions s_{n,m}(x,y) = sin(nπx)·sin(mπy), n,m = 1..N, with
// eigenvalues λ_{n,m} = −(nπ)² − (mπ)². On the grid x_i = i/(N+1) the
// transform pair
//
//   c[n][m] = 4h² Σ_ij g[i][j] sin(nπx_i) sin(mπy_j)     (forward)
//   g[i][j] = Σ_nm  c[n][m] sin(nπx_i) sin(mπy_j)        (inverse)
//
// is exactly mutually inverse (DST-I orthogonality).

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pddrm/grid.hpp"

namespace pddrm {

/// Which scaling a coefficient matrix carries. Raw coefficients come straight
/// from dst_forward; u-space holds ⟨f,s⟩/λ and f-space holds λ⟨u,s⟩.
enum class Space { Raw, USpace, FSpace };

std::string_view to_string(Space s);

/// Coefficients indexed by mode (n, m), both 1-based.
class SpectralCoeffs {
 public:
  SpectralCoeffs(GridSpec grid, Space space, std::vector<double> c);
  static SpectralCoeffs zeros(GridSpec grid, Space space = Space::Raw);

  const GridSpec& grid() const noexcept { return grid_; }
  Space space() const noexcept { return space_; }
  std::size_t n() const noexcept { return grid_.n(); }
  std::span<const double> values() const noexcept { return c_; }
  double at(std::size_t n, std::size_t m) const noexcept { return c_[(n - 1) * grid_.n() + m - 1]; }

 private:
  GridSpec grid_;
  Space space_;
  std::vector<double> c_;
};

/// λ_{n,m} = −(nπ)² − (mπ)² for n, m = 1..N.
class EigenTable {
 public:
  explicit EigenTable(GridSpec grid);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return lambda_; }
  double at(std::size_t n, std::size_t m) const noexcept {
    return lambda_[(n - 1) * grid_.n() + m - 1];
  }

 private:
  GridSpec grid_;
  std::vector<double> lambda_;
};

/// Sine matrix S[k][i] = sin((k+1)π(i+1)h) for one grid size. S is symmetric
/// and S·S = (N+1)/2·I. Plans are cached per N and shared between threads.
class DstPlan {
 public:
  static std::shared_ptr<const DstPlan> for_grid(const GridSpec& grid);

  explicit DstPlan(GridSpec grid);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> sine_matrix() const noexcept { return sine_; }

  /// Raw coefficients of a grid field. in/out are N² row-major; may alias.
  void forward(std::span<const double> in, std::span<double> out) const;
  /// Grid field from coefficients. in/out may alias.
  void inverse(std::span<const double> in, std::span<double> out) const;

 private:
  GridSpec grid_;
  std::vector<double> sine_;
};

SpectralCoeffs dst_forward(const ScalarField& field);
ScalarField dst_inverse(const SpectralCoeffs& coeffs);

EigenTable eigenvalues(GridSpec grid);

/// s_{n,m} sampled on the grid.
ScalarField sine_mode(GridSpec grid, std::size_t n, std::size_t m);

/// ⟨f, s⟩ / λ elementwise: the forward chain's conditioning coefficients.
SpectralCoeffs to_u_space_from_f(const ScalarField& field_f, const EigenTable& eig);
/// λ ⟨u, s⟩ elementwise: the inverse chain's conditioning coefficients.
SpectralCoeffs to_f_space_from_u(const ScalarField& field_u, const EigenTable& eig);

ScalarField spectral_laplacian(const ScalarField& field, const EigenTable& eig);
/// Exact inverse of spectral_laplacian (Dirichlet Poisson solve).
ScalarField spectral_poisson_solve(const ScalarField& f, const EigenTable& eig);

}  // namespace pddrm
