#pragma once
// Scalar one-dimensional solvers: Brent's method for bracketed root finding
// and golden-section search for local minimization on an interval.

#include <functional>

namespace subgauss {

struct RootResult {
  double x;
  double fx;
  int iterations;
  bool converged;
};

// Classic Brent root finder on [a, b].  fa and fb are the already computed
// endpoint values and must have opposite signs; passing them in lets a caller
// substitute endpoint values it trusts more than a re-evaluation (used by the
// scan near lambda = 0).  The stopping tolerance scales with |x|.
RootResult brent_root(const std::function<double(double)>& f,
                      double a, double b, double fa, double fb,
                      double rel_tol, int max_iter = 128);

struct MinResult {
  double x;
  double fx;
  int iterations;
};

// Golden-section minimization on [a, b] with a fixed iteration budget.
MinResult golden_min(const std::function<double(double)>& f,
                     double a, double b, int iterations);

}  // namespace subgauss
