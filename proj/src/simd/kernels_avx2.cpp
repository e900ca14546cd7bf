// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "pddrm/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace pddrm::simd::detail {
namespace {

// Two rows × sixteen columns per register block (8 accumulators).
void gemm_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n) {
  const std::size_t n16 = n - n % 16;
  const std::size_t n4 = n - n % 4;
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const double* a0 = a + i * k;
    const double* a1 = a0 + k;
    double* c0 = c + i * n;
    double* c1 = c0 + n;
    std::size_t j = 0;
    for (; j < n16; j += 16) {
      __m256d r00 = _mm256_setzero_pd(), r01 = _mm256_setzero_pd();
      __m256d r02 = _mm256_setzero_pd(), r03 = _mm256_setzero_pd();
      __m256d r10 = _mm256_setzero_pd(), r11 = _mm256_setzero_pd();
      __m256d r12 = _mm256_setzero_pd(), r13 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        const double* bp = b + p * n + j;
        const __m256d b0 = _mm256_loadu_pd(bp);
        const __m256d b1 = _mm256_loadu_pd(bp + 4);
        const __m256d b2 = _mm256_loadu_pd(bp + 8);
        const __m256d b3 = _mm256_loadu_pd(bp + 12);
        const __m256d x0 = _mm256_broadcast_sd(a0 + p);
        const __m256d x1 = _mm256_broadcast_sd(a1 + p);
        r00 = _mm256_fmadd_pd(x0, b0, r00);
        r01 = _mm256_fmadd_pd(x0, b1, r01);
        r02 = _mm256_fmadd_pd(x0, b2, r02);
        r03 = _mm256_fmadd_pd(x0, b3, r03);
        r10 = _mm256_fmadd_pd(x1, b0, r10);
        r11 = _mm256_fmadd_pd(x1, b1, r11);
        r12 = _mm256_fmadd_pd(x1, b2, r12);
        r13 = _mm256_fmadd_pd(x1, b3, r13);
      }
      _mm256_storeu_pd(c0 + j, r00);
      _mm256_storeu_pd(c0 + j + 4, r01);
      _mm256_storeu_pd(c0 + j + 8, r02);
      _mm256_storeu_pd(c0 + j + 12, r03);
      _mm256_storeu_pd(c1 + j, r10);
      _mm256_storeu_pd(c1 + j + 4, r11);
      _mm256_storeu_pd(c1 + j + 8, r12);
      _mm256_storeu_pd(c1 + j + 12, r13);
    }
    for (; j < n4; j += 4) {
      __m256d r0 = _mm256_setzero_pd(), r1 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        const __m256d bv = _mm256_loadu_pd(b + p * n + j);
        r0 = _mm256_fmadd_pd(_mm256_broadcast_sd(a0 + p), bv, r0);
        r1 = _mm256_fmadd_pd(_mm256_broadcast_sd(a1 + p), bv, r1);
      }
      _mm256_storeu_pd(c0 + j, r0);
      _mm256_storeu_pd(c1 + j, r1);
    }
    for (; j < n; ++j) {
      double s0 = 0.0, s1 = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        s0 += a0[p] * b[p * n + j];
        s1 += a1[p] * b[p * n + j];
      }
      c0[j] = s0;
      c1[j] = s1;
    }
  }
  for (; i < m; ++i) {
    const double* a0 = a + i * k;
    double* c0 = c + i * n;
    std::size_t j = 0;
    for (; j < n4; j += 4) {
      __m256d r0 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p)
        r0 = _mm256_fmadd_pd(_mm256_broadcast_sd(a0 + p), _mm256_loadu_pd(b + p * n + j), r0);
      _mm256_storeu_pd(c0 + j, r0);
    }
    for (; j < n; ++j) {
      double s0 = 0.0;
      for (std::size_t p = 0; p < k; ++p) s0 += a0[p] * b[p * n + j];
      c0[j] = s0;
    }
  }
}

inline double at_or_zero(const double* in, std::size_t n, std::size_t i, std::size_t j) {
  return (i < n && j < n) ? in[i * n + j] : 0.0;
}

void five_point_avx2(const double* in, double* out, std::size_t n, double inv_h2) {
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d s = _mm256_set1_pd(inv_h2);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = in + i * n;
    const double* up = i > 0 ? row - n : nullptr;
    const double* down = i + 1 < n ? row + n : nullptr;
    auto scalar_at = [&](std::size_t j) {
      const double c = row[j];
      const double u = up ? up[j] : 0.0;
      const double d = down ? down[j] : 0.0;
      const double l = j > 0 ? row[j - 1] : 0.0;
      const double r = at_or_zero(in, n, i, j + 1);
      out[i * n + j] = (u + d + l + r - 4.0 * c) * inv_h2;
    };
    if (n < 6) {
      for (std::size_t j = 0; j < n; ++j) scalar_at(j);
      continue;
    }
    scalar_at(0);
    std::size_t j = 1;
    for (; j + 4 <= n - 1; j += 4) {
      const __m256d c = _mm256_loadu_pd(row + j);
      const __m256d u = up ? _mm256_loadu_pd(up + j) : _mm256_setzero_pd();
      const __m256d d = down ? _mm256_loadu_pd(down + j) : _mm256_setzero_pd();
      const __m256d l = _mm256_loadu_pd(row + j - 1);
      const __m256d r = _mm256_loadu_pd(row + j + 1);
      __m256d acc = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(u, d), l), r);
      acc = _mm256_sub_pd(acc, _mm256_mul_pd(four, c));
      _mm256_storeu_pd(out + i * n + j, _mm256_mul_pd(acc, s));
    }
    for (; j < n; ++j) scalar_at(j);
  }
}

void mul_avx2(const double* a, const double* b, double* out, std::size_t len) {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < len; ++i) out[i] = a[i] * b[i];
}

void div_avx2(const double* a, const double* b, double* out, std::size_t len) {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < len; ++i) out[i] = a[i] / b[i];
}

void scale_avx2(const double* a, double s, double* out, std::size_t len) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(sv, _mm256_loadu_pd(a + i)));
  for (; i < len; ++i) out[i] = s * a[i];
}

double abs_diff_sum_avx2(const double* a, const double* b, std::size_t len) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_andnot_pd(sign_mask, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_andnot_pd(sign_mask, d1));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < len; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{gemm_avx2, five_point_avx2, mul_avx2,
                         div_avx2,  scale_avx2,      abs_diff_sum_avx2};
  return k;
}

}  // namespace pddrm::simd::detail
