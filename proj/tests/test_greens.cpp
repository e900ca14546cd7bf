#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pddrm/datagen.hpp"
#include "pddrm/greens.hpp"

using namespace pddrm;

namespace {

constexpr double kPi = std::numbers::pi;

// K by rays from (x, y): for each angle the radial integral of r·ln²r up to
// the boundary is closed-form; the angle is integrated with composite
// Simpson on each of the four pieces between corner directions.
double k_by_rays(double x, double y, int panels = 4000) {
  auto radial = [](double R) {
    const double l = std::log(R);
    return 0.5 * R * R * (l * l - l + 0.5);
  };
  auto reach = [&](double t) {
    const double c = std::cos(t), s = std::sin(t);
    double R = 1e300;
    if (c > 1e-15) R = std::min(R, (1 - x) / c);
    if (c < -1e-15) R = std::min(R, -x / c);
    if (s > 1e-15) R = std::min(R, (1 - y) / s);
    if (s < -1e-15) R = std::min(R, -y / s);
    return R;
  };
  double corners[5] = {std::atan2(1 - y, 1 - x), std::atan2(1 - y, -x), std::atan2(-y, -x) + 2 * kPi,
                       std::atan2(-y, 1 - x) + 2 * kPi, 0};
  corners[4] = corners[0] + 2 * kPi;
  double total = 0.0;
  for (int piece = 0; piece < 4; ++piece) {
    const double a = corners[piece], b = corners[piece + 1], h = (b - a) / panels;
    double acc = radial(reach(a)) + radial(reach(b));
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4 : 2) * radial(reach(a + i * h));
    total += acc * h / 3;
  }
  return total / (4 * kPi * kPi);
}

}  // namespace

TEST_CASE("greens function") {
  CHECK(greens_psi(1.0, 0.0) == 0.0);
  CHECK(greens_psi(0.0, std::exp(1.0)) == doctest::Approx(1 / (2 * kPi)));
  CHECK_THROWS_AS(greens_psi(0.0, 0.0), std::domain_error);
}

TEST_CASE("K kernel agrees with the independent ray integration") {
  for (auto [x, y] : {std::pair{0.5, 0.5}, std::pair{0.2, 0.7}, std::pair{1.0 / 65, 1.0 / 65}, std::pair{0.9, 0.13}}) {
    CAPTURE(x);
    CAPTURE(y);
    const double ref = k_by_rays(x, y);
    CHECK(k_kernel(x, y, 256) == doctest::Approx(ref).epsilon(1e-4));
  }
  CHECK_THROWS_AS(k_kernel(0.0, 0.5), ConfigError);
  CHECK_THROWS_AS(k_kernel(0.5, 0.5, 0), ConfigError);
}

TEST_CASE("K kernel is symmetric under the square's reflections") {
  CHECK(k_kernel(0.2, 0.7, 128) == doctest::Approx(k_kernel(0.8, 0.3, 128)).epsilon(1e-10));
  CHECK(k_kernel(0.2, 0.7, 128) == doctest::Approx(k_kernel(0.7, 0.2, 128)).epsilon(1e-10));
}

TEST_CASE("K bar table") {
  const KBarTable t(GridSpec(64));
  CHECK(std::fabs(t.at(1, 64) - 1967.938) < 1e-3);
  CHECK(t.max() == t.at(1, 64));
  CHECK(t.argmax() == std::pair<std::size_t, std::size_t>{1, 64});
  const double b = 1 / (2 * kPi * kPi) + std::numbers::ln2;
  CHECK(t.at(1, 1) == doctest::Approx(b * b));
  CHECK(thm3_bound_factor(1, 64) == doctest::Approx(t.at(1, 64)));
}

TEST_CASE("thm2 monte carlo matches the discrete variance and the noise-free mean") {
  const GridSpec g(16);
  const auto pair = gen_analytical({AnalyticalKind::Type1, 1, 2, 1}, g);
  const std::vector<GridPoint> pts = {{7, 7}, {1, 12}};
  const auto rep = verify_thm2_mc(pair, 1e-3, 4000, pts, 3, 64);
  CHECK(rep.pass);
  for (const auto& p : rep.points) {
    CHECK(p.empirical_var / p.discrete_var == doctest::Approx(1.0).epsilon(0.1));
    CHECK(p.free_space_var > 0.0);
  }
  const auto zero = verify_thm2_mc(pair, 0.0, 10, pts, 3, 16);
  CHECK(zero.pass);
  CHECK_THROWS_AS(verify_thm2_mc(pair, 1e-3, 10, std::vector<GridPoint>{{16, 0}}, 3), ConfigError);
}

TEST_CASE("thm3 monte carlo stays below the bound") {
  const GridSpec g(16);
  const std::vector<std::pair<std::size_t, std::size_t>> modes = {{1, 1}, {1, 16}, {5, 3}};
  const auto rep = verify_thm3_bound_mc(g, 0.5, modes, 2000, 9);
  CHECK(rep.pass);
  for (const auto& m : rep.modes) {
    CHECK(m.empirical_var == doctest::Approx(m.discrete_var).epsilon(0.15));
    CHECK(m.empirical_var < m.bound);
  }
  CHECK_THROWS_AS(verify_thm3_bound_mc(g, 0.5, std::vector<std::pair<std::size_t, std::size_t>>{{17, 1}}, 10, 1),
                  ConfigError);
}
