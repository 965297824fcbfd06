#pragma once
// Batched evaluation of the centered CGF over a grid of lambda values.
// A scalar reference kernel plus an AVX2 variant selected at runtime; both
// share the max-shift scheme of distribution_core and are held to agree by
// equivalence tests.  The batch axis (lambda points) is the data-parallel
// dimension: every grid scan in the solver and the oracle runs through here.

#include <cstddef>

namespace subgauss::kernels {

enum class Backend { auto_detect, scalar, avx2 };

// True when the AVX2 variant is compiled in and the CPU reports AVX2+FMA.
bool avx2_supported();

// auto_detect -> best available; an explicit avx2 request degrades to scalar
// when unsupported rather than faulting.
Backend resolve(Backend requested);

const char* backend_name(Backend b);

// For each lambda[j]: m0[j] = M(lambda[j]), and optionally m1[j] = M'
// and m2[j] = M''.  y holds the centered atoms (x_i - mu), w the normalized
// weights, n entries each; y_min/y_max must bound y.  m1 and m2 may be null
// when not needed.  m2 uses the one-pass moment formula s2/s0 - m1^2 clamped
// at 0: adequate for curve diagnostics, while cgf_at() remains the
// numerically tightest single-point evaluation.
void cgf_grid(const double* y, const double* w, std::size_t n,
              double y_min, double y_max,
              const double* lambda, std::size_t k,
              double* m0, double* m1, double* m2,
              Backend backend = Backend::auto_detect);

}  // namespace subgauss::kernels
