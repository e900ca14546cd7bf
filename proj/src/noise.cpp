#include "pddrm/noise.hpp"

#include <cmath>
#include <numbers>

#include "pddrm/rng.hpp"
#include "pddrm/spectral.hpp"

namespace pddrm {
namespace {
constexpr std::uint64_t kIidStream = 0x4949'4447;     // "IIDG"
constexpr std::uint64_t kBridgeStream = 0x4252'4447;  // "BRDG"
}  // namespace

BridgeSpec BridgeSpec::constant(GridSpec grid, double sigma) {
  return from_table(grid, std::vector<double>(grid.size(), sigma));
}

BridgeSpec BridgeSpec::from_table(GridSpec grid, std::vector<double> sigma, bool allow_zero) {
  if (sigma.size() != grid.size()) throw DimensionError("bridge sigma table has the wrong size");
  for (double s : sigma) {
    if (!std::isfinite(s) || s < 0.0 || (!allow_zero && s == 0.0))
      throw ConfigError("bridge sigma entries must be finite and > 0");
  }
  return BridgeSpec(grid, std::move(sigma));
}

NoiseSchedule::NoiseSchedule(std::vector<double> sigmas) : sigmas_(std::move(sigmas)) {
  if (sigmas_.size() < 2) throw ConfigError("schedule needs T >= 1");
  if (sigmas_.front() != 0.0) throw ConfigError("schedule must start at sigma_0 = 0");
  for (std::size_t t = 1; t < sigmas_.size(); ++t)
    if (!(sigmas_[t] > sigmas_[t - 1]) || !std::isfinite(sigmas_[t]))
      throw ConfigError("schedule must be strictly increasing");
}

NoiseSchedule make_schedule(std::size_t T, double sigma_min, double sigma_max, ScheduleKind kind) {
  if (T < 1) throw ConfigError("schedule needs T >= 1");
  if (!(sigma_min > 0.0) || !(sigma_max > sigma_min))
    throw ConfigError("schedule needs 0 < sigma_min < sigma_max");
  std::vector<double> s(T + 1, 0.0);
  switch (kind) {
    case ScheduleKind::Geometric:
      // T = 1 leaves the exponent undefined; the single level is sigma_max.
      if (T == 1) {
        s[1] = sigma_max;
      } else {
        const double ratio = sigma_max / sigma_min;
        for (std::size_t t = 1; t <= T; ++t)
          s[t] = sigma_min * std::pow(ratio, static_cast<double>(t - 1) / static_cast<double>(T - 1));
        s[T] = sigma_max;
      }
      break;
  }
  return NoiseSchedule(std::move(s));
}

NoiseSchedule default_schedule() { return make_schedule(100, 0.01, 2.0); }

ScalarField sample_iid_gaussian(GridSpec grid, double sigma_f, std::uint64_t seed) {
  if (!(sigma_f >= 0.0)) throw ConfigError("sigma_f must be >= 0");
  std::vector<double> v(grid.size(), 0.0);
  if (sigma_f > 0.0) {
    CounterRng rng(stream_key(seed, kIidStream));
    for (double& e : v) e = sigma_f * rng.normal();
  }
  return ScalarField(grid, std::move(v));
}

std::vector<double> sample_bridge_coefficients(const BridgeSpec& spec, std::uint64_t seed) {
  CounterRng rng(stream_key(seed, kBridgeStream));
  std::vector<double> w(spec.grid().size());
  const auto sigma = spec.sigma();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = sigma[i] * rng.normal();
  return w;
}

ScalarField sample_brownian_bridge(GridSpec grid, const BridgeSpec& spec, std::uint64_t seed) {
  if (spec.grid() != grid) throw DimensionError("bridge spec built for a different grid");
  return dst_inverse(SpectralCoeffs(grid, Space::Raw, sample_bridge_coefficients(spec, seed)));
}

double bridge_pointwise_variance(const BridgeSpec& spec, double x, double y) {
  const std::size_t n = spec.grid().n();
  double acc = 0.0;
  for (std::size_t a = 1; a <= n; ++a) {
    const double sx = std::sin(static_cast<double>(a) * std::numbers::pi * x);
    for (std::size_t b = 1; b <= n; ++b) {
      const double sy = std::sin(static_cast<double>(b) * std::numbers::pi * y);
      const double s = spec.at(a, b);
      acc += s * s * sx * sx * sy * sy;
    }
  }
  return acc;
}

}  // namespace pddrm
