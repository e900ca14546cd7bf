#pragma once

// Free-space Green's function quantities behind the forward chain's
// uncertainty model, and Monte-Carlo checks of the two distributional
// statements built on them.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pddrm/grid.hpp"

namespace pddrm {

/// ψ(dx, dy) = ln‖(dx, dy)‖ / (2π). Throws std::domain_error at the origin.
double greens_psi(double dx, double dy);

/// K(x, y) = ∬_Ω ψ((x′,y′) − (x,y))² dx′dy′ on the unit square.
///
/// Midpoint rule on a quadrature_n × quadrature_n mesh; the cell containing
/// (x, y) is integrated in polar coordinates about the singular point, with
/// the radial integral of r·ln²r done in closed form.
double k_kernel(double x, double y, std::size_t quadrature_n = 256);

/// K̄[n][m] = (1/|λ_{n,m}| + ln2·max(n,m))².
class KBarTable {
 public:
  explicit KBarTable(GridSpec grid);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return kbar_; }
  double at(std::size_t n, std::size_t m) const noexcept { return kbar_[(n - 1) * grid_.n() + m - 1]; }
  /// First (n, m) in row-major order attaining the maximum.
  std::pair<std::size_t, std::size_t> argmax() const;
  double max() const;

 private:
  GridSpec grid_;
  std::vector<double> kbar_;
};

KBarTable kbar_table(GridSpec grid);

/// (1/(π²(n²+m²)) + ln2·max(n,m))², the per-mode variance bound divided by σ_f².
double thm3_bound_factor(std::size_t n, std::size_t m);

struct GridPoint {
  std::size_t i = 0;
  std::size_t j = 0;
};

struct Thm2PointReport {
  GridPoint point;
  double x = 0.0, y = 0.0;
  double reference_mean = 0.0;   // noise-free spectral solution at the point
  double empirical_mean = 0.0;
  double mean_std_error = 0.0;
  double empirical_var = 0.0;
  double discrete_var = 0.0;     // exact variance of the discrete spectral solve
  double free_space_var = 0.0;   // σ_f²·h²·K(x, y)
  bool pass = false;
};

struct Thm2Report {
  double sigma_f = 0.0;
  std::size_t draws = 0;
  std::vector<Thm2PointReport> points;
  bool pass = false;
};

/// Draws z_f ~ N(0, σ_f²) i.i.d. on the grid, solves Δu = f + z_f spectrally
/// and compares the per-point mean and variance against the noise-free
/// solution and the exact discrete variance Σ 4h²σ_f² s_{n,m}(x)²/λ². A point
/// passes when the mean lies within 4 standard errors and the variance ratio
/// lies in [0.5, 2]. The free-space σ_f²h²K(x, y) is reported alongside.
Thm2Report verify_thm2_mc(const PairSample& pair, double sigma_f, std::size_t draws,
                          std::span<const GridPoint> points, std::uint64_t seed,
                          std::size_t quadrature_n = 256);

struct Thm3ModeReport {
  std::size_t n = 0, m = 0;
  double empirical_var = 0.0;
  double discrete_var = 0.0;  // 4h²σ_f²/λ²
  double bound = 0.0;         // thm3_bound_factor·σ_f²
  bool pass = false;
};

struct Thm3Report {
  double sigma_f = 0.0;
  std::size_t draws = 0;
  std::vector<Thm3ModeReport> modes;
  bool pass = false;
};

/// Monte-Carlo variance of the sine coefficients of Δ⁻¹z_f against the
/// per-mode bound; passes when every empirical variance is below its bound.
Thm3Report verify_thm3_bound_mc(GridSpec grid, double sigma_f,
                                std::span<const std::pair<std::size_t, std::size_t>> modes,
                                std::size_t draws, std::uint64_t seed);

}  // namespace pddrm
