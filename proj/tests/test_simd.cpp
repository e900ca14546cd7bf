#include "doctest.h"

#include <cmath>
#include <vector>

#include "pddrm/rng.hpp"
#include "pddrm/simd/kernels.hpp"

using namespace pddrm;
using namespace pddrm::simd;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  CounterRng rng(stream_key(seed, 0x51));
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

// Triple loop, the definition of C = A·B.
std::vector<double> naive_gemm(const std::vector<double>& a, const std::vector<double>& b, std::size_t m,
                               std::size_t k, std::size_t n) {
  std::vector<double> c(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      long double acc = 0;
      for (std::size_t p = 0; p < k; ++p) acc += static_cast<long double>(a[i * k + p]) * b[p * n + j];
      c[i * n + j] = static_cast<double>(acc);
    }
  return c;
}

std::vector<double> naive_five_point(const std::vector<double>& u, std::size_t n, double inv_h2) {
  auto at = [&](long i, long j) -> double {
    if (i < 0 || j < 0 || i >= static_cast<long>(n) || j >= static_cast<long>(n)) return 0.0;
    return u[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
  };
  std::vector<double> out(n * n);
  for (long i = 0; i < static_cast<long>(n); ++i)
    for (long j = 0; j < static_cast<long>(n); ++j)
      out[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] =
          (at(i - 1, j) + at(i + 1, j) + at(i, j - 1) + at(i, j + 1) - 4.0 * at(i, j)) * inv_h2;
  return out;
}

std::vector<Backend> backends() {
  std::vector<Backend> b{Backend::Scalar};
  if (backend_available(Backend::Avx2)) b.push_back(Backend::Avx2);
  return b;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]) / std::max(1.0, std::fabs(b[i])));
  return m;
}

}  // namespace

TEST_CASE("scalar backend is always available") { CHECK(backend_available(Backend::Scalar)); }

TEST_CASE("gemm matches the triple loop on every backend, including ragged shapes") {
  const std::size_t shapes[][3] = {{1, 1, 1}, {3, 5, 7}, {17, 9, 33}, {64, 64, 64}, {65, 31, 18}};
  for (Backend be : backends()) {
    CAPTURE(backend_name(be));
    for (const auto& s : shapes) {
      const auto a = noise(s[0] * s[1], 1 + s[0]), b = noise(s[1] * s[2], 2 + s[2]);
      std::vector<double> c(s[0] * s[2], 123.0);
      kernels(be).gemm(a.data(), b.data(), c.data(), s[0], s[1], s[2]);
      CHECK(max_rel(c, naive_gemm(a, b, s[0], s[1], s[2])) < 1e-13);
    }
  }
}

TEST_CASE("five-point stencil matches the ghost-cell definition on every backend") {
  for (Backend be : backends()) {
    CAPTURE(backend_name(be));
    for (std::size_t n : {2u, 3u, 5u, 8u, 13u, 64u}) {
      const auto u = noise(n * n, n);
      std::vector<double> out(n * n);
      kernels(be).five_point(u.data(), out.data(), n, 4225.0);
      CHECK(max_rel(out, naive_five_point(u, n, 4225.0)) < 1e-12);
    }
  }
}

TEST_CASE("elementwise kernels agree between backends") {
  for (std::size_t n : {1u, 3u, 4u, 7u, 100u, 4096u}) {
    const auto a = noise(n, 10 + n), b = noise(n, 20 + n, 0.5, 2.0);
    std::vector<double> ref_mul(n), ref_div(n), ref_scale(n);
    for (std::size_t i = 0; i < n; ++i) {
      ref_mul[i] = a[i] * b[i];
      ref_div[i] = a[i] / b[i];
      ref_scale[i] = a[i] * -3.5;
    }
    double ref_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) ref_abs += std::fabs(a[i] - b[i]);
    for (Backend be : backends()) {
      CAPTURE(backend_name(be));
      const Kernels& k = kernels(be);
      std::vector<double> out(n);
      k.mul(a.data(), b.data(), out.data(), n);
      CHECK(out == ref_mul);
      k.div(a.data(), b.data(), out.data(), n);
      CHECK(out == ref_div);
      k.scale(a.data(), -3.5, out.data(), n);
      CHECK(out == ref_scale);
      CHECK(k.abs_diff_sum(a.data(), b.data(), n) == doctest::Approx(ref_abs).epsilon(1e-13));
    }
  }
}

TEST_CASE("set_backend switches the active table") {
  const Backend before = active_backend();
  set_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  set_backend(before);
  CHECK(active_backend() == before);
}
