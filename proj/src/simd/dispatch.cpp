#include "pddrm/simd/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace pddrm::simd {
namespace {

bool cpu_has_avx2() {
#if defined(PDDRM_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("PDDRM_SIMD"); env && std::string(env) == "scalar")
    return Backend::Scalar;
  return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2: {
      static const bool ok = cpu_has_avx2();
      return ok;
    }
  }
  return false;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("simd backend unavailable: " + std::string(backend_name(b)));
  current().store(b, std::memory_order_relaxed);
}

const Kernels& kernels(Backend b) {
#if defined(PDDRM_HAVE_AVX2_KERNELS)
  if (b == Backend::Avx2) {
    if (!backend_available(b)) throw std::invalid_argument("simd backend unavailable: avx2");
    return detail::avx2_kernels();
  }
#endif
  (void)b;
  return detail::scalar_kernels();
}

namespace {
const Kernels& active() { return kernels(active_backend()); }
}  // namespace

void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c,
          std::size_t m, std::size_t k, std::size_t n) {
  assert(a.size() >= m * k && b.size() >= k * n && c.size() >= m * n);
  active().gemm(a.data(), b.data(), c.data(), m, k, n);
}

void five_point(std::span<const double> in, std::span<double> out, std::size_t n, double inv_h2) {
  assert(in.size() >= n * n && out.size() >= n * n);
  active().five_point(in.data(), out.data(), n, inv_h2);
}

void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && out.size() == a.size());
  active().mul(a.data(), b.data(), out.data(), a.size());
}

void div(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && out.size() == a.size());
  active().div(a.data(), b.data(), out.data(), a.size());
}

void scale(std::span<const double> a, double s, std::span<double> out) {
  assert(out.size() == a.size());
  active().scale(a.data(), s, out.data(), a.size());
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().abs_diff_sum(a.data(), b.data(), a.size());
}

}  // namespace pddrm::simd
