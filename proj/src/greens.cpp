#include "pddrm/greens.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pddrm/noise.hpp"
#include "pddrm/rng.hpp"
#include "pddrm/spectral.hpp"

namespace pddrm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kThm2Stream = 0x5448'4d32;  // "THM2"
constexpr std::uint64_t kThm3Stream = 0x5448'4d33;  // "THM3"

// 32-point Gauss-Legendre rule on [-1, 1], built once by Newton iteration.
struct GaussLegendre {
  static constexpr std::size_t kOrder = 32;
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};

  GaussLegendre() {
    const std::size_t n = kOrder;
    for (std::size_t i = 0; i < n; ++i) {
      double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = pk;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre gl;
  return gl;
}

// ∫_0^R r ln²r dr
double radial_log2(double r) {
  if (r <= 0.0) return 0.0;
  const double l = std::log(r);
  return 0.5 * r * r * (l * l - l + 0.5);
}

template <class F>
double integrate_angle(F&& g, double lo, double hi) {
  if (hi <= lo) return 0.0;
  const auto& gl = gauss_legendre();
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (std::size_t i = 0; i < GaussLegendre::kOrder; ++i) acc += gl.weights[i] * g(mid + half * gl.nodes[i]);
  return acc * half;
}

// ∬ ln²r over [0,a]×[0,b] with the singular point at the corner.
double corner_rect_log2(double a, double b) {
  if (a <= 0.0 || b <= 0.0) return 0.0;
  const double split = std::atan2(b, a);
  return integrate_angle([&](double t) { return radial_log2(a / std::cos(t)); }, 0.0, split) +
         integrate_angle([&](double t) { return radial_log2(b / std::sin(t)); }, split, kPi / 2);
}

// ∬ ψ² over [x0,x1]×[y0,y1] containing the singular point (px, py).
double singular_cell_psi2(double x0, double x1, double y0, double y1, double px, double py) {
  const double left = px - x0, right = x1 - px, down = py - y0, up = y1 - py;
  const double sum = corner_rect_log2(right, up) + corner_rect_log2(left, up) +
                     corner_rect_log2(left, down) + corner_rect_log2(right, down);
  return sum / (4.0 * kPi * kPi);
}

}  // namespace

double greens_psi(double dx, double dy) {
  const double r = std::hypot(dx, dy);
  if (r == 0.0) throw std::domain_error("greens_psi: singular at the origin");
  return std::log(r) / (2.0 * kPi);
}

double k_kernel(double x, double y, std::size_t quadrature_n) {
  if (quadrature_n < 1) throw ConfigError("k_kernel: quadrature_n must be >= 1");
  if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0))
    throw ConfigError("k_kernel: point must lie in the open unit square");
  const std::size_t q = quadrature_n;
  const double a = 1.0 / static_cast<double>(q);
  const std::size_t si = std::min(q - 1, static_cast<std::size_t>(x * static_cast<double>(q)));
  const std::size_t sj = std::min(q - 1, static_cast<std::size_t>(y * static_cast<double>(q)));
  const double inv = 1.0 / (4.0 * kPi * kPi);
  double acc = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    const double dx = (static_cast<double>(i) + 0.5) * a - x;
    for (std::size_t j = 0; j < q; ++j) {
      if (i == si && j == sj) continue;
      const double dy = (static_cast<double>(j) + 0.5) * a - y;
      const double l = 0.5 * std::log(dx * dx + dy * dy);
      acc += l * l;
    }
  }
  acc *= a * a * inv;
  acc += singular_cell_psi2(static_cast<double>(si) * a, static_cast<double>(si + 1) * a,
                            static_cast<double>(sj) * a, static_cast<double>(sj + 1) * a, x, y);
  return acc;
}

double thm3_bound_factor(std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  const double b = 1.0 / (kPi * kPi * (nn * nn + mm * mm)) + std::numbers::ln2 * std::max(nn, mm);
  return b * b;
}

KBarTable::KBarTable(GridSpec grid) : grid_(grid), kbar_(grid.size()) {
  const EigenTable eig(grid);
  const std::size_t N = grid.n();
  for (std::size_t n = 1; n <= N; ++n)
    for (std::size_t m = 1; m <= N; ++m) {
      const double b = 1.0 / std::fabs(eig.at(n, m)) +
                       std::numbers::ln2 * static_cast<double>(std::max(n, m));
      kbar_[(n - 1) * N + m - 1] = b * b;
    }
}

std::pair<std::size_t, std::size_t> KBarTable::argmax() const {
  const auto it = std::max_element(kbar_.begin(), kbar_.end());
  const auto idx = static_cast<std::size_t>(it - kbar_.begin());
  return {idx / grid_.n() + 1, idx % grid_.n() + 1};
}

double KBarTable::max() const { return *std::max_element(kbar_.begin(), kbar_.end()); }

KBarTable kbar_table(GridSpec grid) { return KBarTable(grid); }

Thm2Report verify_thm2_mc(const PairSample& pair, double sigma_f, std::size_t draws,
                          std::span<const GridPoint> points, std::uint64_t seed,
                          std::size_t quadrature_n) {
  if (draws < 2) throw ConfigError("verify_thm2_mc: need at least 2 draws");
  const GridSpec grid = pair.f.grid();
  const EigenTable eig(grid);
  const ScalarField u_ref = spectral_poisson_solve(pair.f, eig);
  const std::size_t N = grid.n();
  for (const auto& p : points)
    if (p.i >= N || p.j >= N) throw ConfigError("verify_thm2_mc: point outside the grid");

  std::vector<double> sum(points.size(), 0.0), sum_sq(points.size(), 0.0);
  for (std::size_t d = 0; d < draws; ++d) {
    const ScalarField z = sample_iid_gaussian(grid, sigma_f, stream_key(seed, kThm2Stream, d));
    const ScalarField u = spectral_poisson_solve(combine(1.0, pair.f, 1.0, z), eig);
    for (std::size_t k = 0; k < points.size(); ++k) {
      // Accumulate deviations from the reference to avoid cancellation.
      const double dev = u(points[k].i, points[k].j) - u_ref(points[k].i, points[k].j);
      sum[k] += dev;
      sum_sq[k] += dev * dev;
    }
  }

  const auto sines = DstPlan::for_grid(grid)->sine_matrix();
  const double h = grid.h();
  Thm2Report rep{sigma_f, draws, {}, true};
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto [pi, pj] = points[k];
    Thm2PointReport r;
    r.point = points[k];
    r.x = grid.coord(pi);
    r.y = grid.coord(pj);
    r.reference_mean = u_ref(pi, pj);
    const double dn = static_cast<double>(draws);
    const double mean_dev = sum[k] / dn;
    r.empirical_mean = r.reference_mean + mean_dev;
    r.empirical_var = (sum_sq[k] - dn * mean_dev * mean_dev) / (dn - 1.0);
    r.mean_std_error = std::sqrt(std::max(r.empirical_var, 0.0) / dn);
    double dv = 0.0;
    for (std::size_t n = 1; n <= N; ++n)
      for (std::size_t m = 1; m <= N; ++m) {
        const double s = sines[(n - 1) * N + pi] * sines[(m - 1) * N + pj];
        const double lam = eig.at(n, m);
        dv += s * s / (lam * lam);
      }
    r.discrete_var = 4.0 * h * h * sigma_f * sigma_f * dv;
    r.free_space_var = sigma_f * sigma_f * h * h * k_kernel(r.x, r.y, quadrature_n);
    if (sigma_f == 0.0) {
      r.pass = r.empirical_var == 0.0 && mean_dev == 0.0;
    } else {
      const double ratio = r.empirical_var / r.discrete_var;
      r.pass = std::fabs(mean_dev) <= 4.0 * r.mean_std_error && ratio >= 0.5 && ratio <= 2.0;
    }
    rep.pass = rep.pass && r.pass;
    rep.points.push_back(r);
  }
  return rep;
}

Thm3Report verify_thm3_bound_mc(GridSpec grid, double sigma_f,
                                std::span<const std::pair<std::size_t, std::size_t>> modes,
                                std::size_t draws, std::uint64_t seed) {
  if (draws < 2) throw ConfigError("verify_thm3_bound_mc: need at least 2 draws");
  const std::size_t N = grid.n();
  for (const auto& [n, m] : modes)
    if (n < 1 || m < 1 || n > N || m > N) throw ConfigError("verify_thm3_bound_mc: mode out of range");
  const EigenTable eig(grid);
  std::vector<double> sum(modes.size(), 0.0), sum_sq(modes.size(), 0.0);
  for (std::size_t d = 0; d < draws; ++d) {
    const ScalarField z = sample_iid_gaussian(grid, sigma_f, stream_key(seed, kThm3Stream, d));
    const SpectralCoeffs c = dst_forward(spectral_poisson_solve(z, eig));
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double v = c.at(modes[k].first, modes[k].second);
      sum[k] += v;
      sum_sq[k] += v * v;
    }
  }
  const double h = grid.h();
  const double dn = static_cast<double>(draws);
  Thm3Report rep{sigma_f, draws, {}, true};
  for (std::size_t k = 0; k < modes.size(); ++k) {
    Thm3ModeReport r;
    r.n = modes[k].first;
    r.m = modes[k].second;
    const double mean = sum[k] / dn;
    r.empirical_var = (sum_sq[k] - dn * mean * mean) / (dn - 1.0);
    const double lam = eig.at(r.n, r.m);
    r.discrete_var = 4.0 * h * h * sigma_f * sigma_f / (lam * lam);
    r.bound = thm3_bound_factor(r.n, r.m) * sigma_f * sigma_f;
    r.pass = r.empirical_var <= r.bound;
    rep.pass = rep.pass && r.pass;
    rep.modes.push_back(r);
  }
  return rep;
}

}  // namespace pddrm
