#include "subgauss/kernels.hpp"

#include <cmath>

#ifdef SUBGAUSS_AVX2_TU
namespace subgauss::kernels::detail {
// Implemented in the AVX2-compiled translation unit.
void cgf_grid_avx2(const double* y, const double* w, std::size_t n,
                   double y_min, double y_max, const double* lambda,
                   std::size_t k, double* m0, double* m1, double* m2);
}  // namespace subgauss::kernels::detail
#endif

namespace subgauss::kernels {

namespace {

void cgf_grid_scalar(const double* y, const double* w, std::size_t n,
                     double y_min, double y_max, const double* lambda,
                     std::size_t k, double* m0, double* m1, double* m2) {
  for (std::size_t j = 0; j < k; ++j) {
    const double l = lambda[j];
    const double shift = std::max(l * y_min, l * y_max);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = w[i] * std::exp(l * y[i] - shift);
      s0 += e;
      s1 += e * y[i];
      s2 += e * y[i] * y[i];
    }
    const double t1 = s1 / s0;
    if (m0) m0[j] = shift + std::log(s0);
    if (m1) m1[j] = t1;
    // One-pass variance of the tilted law; clamp the cancellation residue.
    if (m2) m2[j] = std::max(s2 / s0 - t1 * t1, 0.0);
  }
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend resolve(Backend requested) {
  if (requested == Backend::scalar) return Backend::scalar;
#ifdef SUBGAUSS_AVX2_TU
  if (avx2_supported()) return Backend::avx2;
#endif
  // Explicit avx2 requests degrade to scalar when unsupported.
  return Backend::scalar;
}

const char* backend_name(Backend requested) {
  return resolve(requested) == Backend::avx2 ? "avx2" : "scalar";
}

void cgf_grid(const double* y, const double* w, std::size_t n, double y_min,
              double y_max, const double* lambda, std::size_t k, double* m0,
              double* m1, double* m2, Backend backend) {
  if (n == 0 || k == 0) return;
  const Backend chosen = resolve(backend);
#ifdef SUBGAUSS_AVX2_TU
  if (chosen == Backend::avx2) {
    detail::cgf_grid_avx2(y, w, n, y_min, y_max, lambda, k, m0, m1, m2);
    return;
  }
#endif
  (void)chosen;
  cgf_grid_scalar(y, w, n, y_min, y_max, lambda, k, m0, m1, m2);
}

}  // namespace subgauss::kernels
