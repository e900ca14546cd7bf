#include "pddrm/simd/kernels.hpp"

#include <cmath>

namespace pddrm::simd::detail {
namespace {

void gemm_scalar(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void five_point_scalar(const double* in, double* out, std::size_t n, double inv_h2) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double c = in[i * n + j];
      const double up = i > 0 ? in[(i - 1) * n + j] : 0.0;
      const double down = i + 1 < n ? in[(i + 1) * n + j] : 0.0;
      const double left = j > 0 ? in[i * n + j - 1] : 0.0;
      const double right = j + 1 < n ? in[i * n + j + 1] : 0.0;
      out[i * n + j] = (up + down + left + right - 4.0 * c) * inv_h2;
    }
  }
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = a[i] * b[i];
}

void div_scalar(const double* a, const double* b, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = a[i] / b[i];
}

void scale_scalar(const double* a, double s, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = s * a[i];
}

double abs_diff_sum_scalar(const double* a, const double* b, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{gemm_scalar, five_point_scalar, mul_scalar,
                         div_scalar,  scale_scalar,      abs_diff_sum_scalar};
  return k;
}

}  // namespace pddrm::simd::detail
