// AVX2+FMA batch kernel for the tilted-moment grid. Compiled in its own
// translation unit with -mavx2 -mfma; callers reach it only after a runtime
// CPU check, so no other object file needs those flags.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace subgauss::kernels::detail {

namespace {

// Vectorized exp for 4 doubles. Range-reduced Cephes rational approximation:
// exp(x) = 2^n * e^r with r = x - n*ln2 split hi/lo for accuracy, and
// e^r = 1 + 2r*P(r^2) / (Q(r^2) - r*P(r^2)). Inputs are clamped to the
// representable range; lanes below -708 flush to zero (the kernel's shifted
// exponents are always <= 0, so overflow cannot occur, but clamping is kept
// for safety).
inline __m256d expd4(__m256d x) {
  const __m256d max_x = _mm256_set1_pd(709.0);
  const __m256d min_x = _mm256_set1_pd(-708.0);
  const __m256d underflow_mask = _mm256_cmp_pd(x, min_x, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, min_x), max_x);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);
  const __m256d r2 = _mm256_mul_pd(r, r);

  // P and Q in r^2 (Cephes expml coefficients for double precision).
  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, r);

  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_fmadd_pd(q, r2, _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, r2, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, r2, _mm256_set1_pd(2.0));

  const __m256d one = _mm256_set1_pd(1.0);
  __m256d e = _mm256_add_pd(
      one, _mm256_div_pd(_mm256_add_pd(p, p), _mm256_sub_pd(q, p)));

  // Scale by 2^n: build the exponent bits directly. |n| <= 1024 here, so the
  // int32 intermediate is exact.
  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m256i nl = _mm256_cvtepi32_epi64(ni);
  const __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(nl, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));

  return _mm256_andnot_pd(underflow_mask, e);
}

// Accumulate shifted tilted sums for 4 lambda values at once.
inline void block4(const double* y, const double* w, std::size_t n,
                   double y_min, double y_max, const double* lambda,
                   double* m0, double* m1, double* m2) {
  const __m256d lv = _mm256_loadu_pd(lambda);
  const __m256d shift =
      _mm256_max_pd(_mm256_mul_pd(lv, _mm256_set1_pd(y_min)),
                    _mm256_mul_pd(lv, _mm256_set1_pd(y_max)));
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n; ++i) {
    const __m256d yi = _mm256_set1_pd(y[i]);
    const __m256d t = _mm256_fmsub_pd(lv, yi, shift);
    const __m256d e = _mm256_mul_pd(expd4(t), _mm256_set1_pd(w[i]));
    s0 = _mm256_add_pd(s0, e);
    s1 = _mm256_fmadd_pd(e, yi, s1);
    s2 = _mm256_fmadd_pd(_mm256_mul_pd(e, yi), yi, s2);
  }
  alignas(32) double a0[4], a1[4], a2[4], ash[4];
  _mm256_store_pd(a0, s0);
  _mm256_store_pd(a1, s1);
  _mm256_store_pd(a2, s2);
  _mm256_store_pd(ash, shift);
  for (int lane = 0; lane < 4; ++lane) {
    const double t1 = a1[lane] / a0[lane];
    if (m0) m0[lane] = ash[lane] + std::log(a0[lane]);
    if (m1) m1[lane] = t1;
    if (m2) m2[lane] = std::max(a2[lane] / a0[lane] - t1 * t1, 0.0);
  }
}

}  // namespace

void cgf_grid_avx2(const double* y, const double* w, std::size_t n,
                   double y_min, double y_max, const double* lambda,
                   std::size_t k, double* m0, double* m1, double* m2) {
  std::size_t j = 0;
  for (; j + 4 <= k; j += 4) {
    block4(y, w, n, y_min, y_max, lambda + j, m0 ? m0 + j : nullptr,
           m1 ? m1 + j : nullptr, m2 ? m2 + j : nullptr);
  }
  if (j < k) {
    // Pad the final partial block with the last lambda so every lane stays in
    // the numerically safe range, then copy out only the live lanes.
    double lpad[4], b0[4], b1[4], b2[4];
    const std::size_t rem = k - j;
    for (std::size_t t = 0; t < 4; ++t)
      lpad[t] = lambda[j + std::min(t, rem - 1)];
    block4(y, w, n, y_min, y_max, lpad, b0, b1, b2);
    for (std::size_t t = 0; t < rem; ++t) {
      if (m0) m0[j + t] = b0[t];
      if (m1) m1[j + t] = b1[t];
      if (m2) m2[j + t] = b2[t];
    }
  }
}

}  // namespace subgauss::kernels::detail
