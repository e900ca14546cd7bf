#pragma once

// Data-parallel inner loops shared by the spectral, fd, datagen and metric
// code. Every kernel has a scalar reference implementation; wider variants
// are selected at runtime and must agree with the reference to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace pddrm::simd {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);

/// True when the backend was compiled in and the running CPU supports it.
bool backend_available(Backend b);

/// The backend used by the free functions below. Defaults to the widest
/// available one; PDDRM_SIMD=scalar in the environment forces the reference.
Backend active_backend();

/// Throws std::invalid_argument if the backend is unavailable.
void set_backend(Backend b);

/// Kernel table for one backend. Row-major storage everywhere.
struct Kernels {
  /// c(m×n) = a(m×k) · b(k×n); c must not alias a or b.
  void (*gemm)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n);
  /// Five-point stencil with zero ghost cells on an n×n block, scaled by inv_h2.
  void (*five_point)(const double* in, double* out, std::size_t n, double inv_h2);
  /// out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t len);
  /// out[i] = a[i] / b[i]
  void (*div)(const double* a, const double* b, double* out, std::size_t len);
  /// out[i] = s * a[i]
  void (*scale)(const double* a, double s, double* out, std::size_t len);
  /// Σ |a[i] - b[i]|
  double (*abs_diff_sum)(const double* a, const double* b, std::size_t len);
};

const Kernels& kernels(Backend b);

// Span wrappers over the active backend.

void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c,
          std::size_t m, std::size_t k, std::size_t n);
void five_point(std::span<const double> in, std::span<double> out, std::size_t n, double inv_h2);
void mul(std::span<const double> a, std::span<const double> b, std::span<double> out);
void div(std::span<const double> a, std::span<const double> b, std::span<double> out);
void scale(std::span<const double> a, double s, std::span<double> out);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);

namespace detail {
const Kernels& scalar_kernels();
#if defined(PDDRM_HAVE_AVX2_KERNELS)
const Kernels& avx2_kernels();
#endif
}  // namespace detail

}  // namespace pddrm::simd
