#pragma once

// Measurement-noise models and the chain noise schedule.

#include <cstdint>
#include <span>
#include <vector>

#include "pddrm/grid.hpp"

namespace pddrm {

/// Standard deviations σ_{n,m} of the sine coefficients of bridge noise.
class BridgeSpec {
 public:
  /// Constant σ for every mode (default 1e-6).
  static BridgeSpec constant(GridSpec grid, double sigma = 1e-6);
  /// Throws ConfigError unless every entry is finite and > 0. A table with
  /// zeros is allowed through `from_table(..., allow_zero = true)` only, for
  /// single-mode experiments.
  static BridgeSpec from_table(GridSpec grid, std::vector<double> sigma, bool allow_zero = false);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> sigma() const noexcept { return sigma_; }
  double at(std::size_t n, std::size_t m) const noexcept { return sigma_[(n - 1) * grid_.n() + m - 1]; }

 private:
  BridgeSpec(GridSpec grid, std::vector<double> sigma) : grid_(grid), sigma_(std::move(sigma)) {}
  GridSpec grid_;
  std::vector<double> sigma_;
};

/// 0 = σ_0 < σ_1 < … < σ_T.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(std::vector<double> sigmas);

  std::size_t steps() const noexcept { return sigmas_.size() - 1; }  // T
  double sigma(std::size_t t) const noexcept { return sigmas_[t]; }
  double sigma_max() const noexcept { return sigmas_.back(); }
  std::span<const double> sigmas() const noexcept { return sigmas_; }

 private:
  std::vector<double> sigmas_;
};

enum class ScheduleKind { Geometric };

/// σ_t = σ_min·(σ_max/σ_min)^{(t−1)/(T−1)} for t = 1..T, σ_0 = 0.
NoiseSchedule make_schedule(std::size_t T, double sigma_min, double sigma_max,
                            ScheduleKind kind = ScheduleKind::Geometric);

/// Default chain schedule: geometric, T = 100, 0.01 → 2.
NoiseSchedule default_schedule();

/// i.i.d. N(0, σ_f²) at every interior point. σ_f = 0 gives the zero field.
ScalarField sample_iid_gaussian(GridSpec grid, double sigma_f, std::uint64_t seed);

/// Sine-coefficient draws w_{n,m} ~ N(0, σ_{n,m}²) of one bridge sample.
std::vector<double> sample_bridge_coefficients(const BridgeSpec& spec, std::uint64_t seed);

/// z_u = Σ w_{n,m} s_{n,m}; vanishes on the boundary by construction.
ScalarField sample_brownian_bridge(GridSpec grid, const BridgeSpec& spec, std::uint64_t seed);

/// Var[z_u(x, y)] = Σ σ_{n,m}² sin²(nπx) sin²(mπy) at a continuous point.
double bridge_pointwise_variance(const BridgeSpec& spec, double x, double y);

}  // namespace pddrm
