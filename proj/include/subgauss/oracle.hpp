#pragma once
// Brute-force verification tools, independent of the root-finding engine:
// a grid nonnegativity check of g(.; s2), bisection on s2 that pins the
// optimal proxy from the definition alone, and curve sampling for plots.

#include <utility>
#include <vector>

#include "subgauss/characterizer.hpp"
#include "subgauss/distribution.hpp"
#include "subgauss/kernels.hpp"

namespace subgauss {

struct GridConfig {
  int grid_points = 20001;
  int golden_iters = 64;               // local refinement around the grid argmin
  double tol_violation_scale = 1e-12;  // pass iff min g >= -scale * max(1, s2)
  kernels::Backend backend = kernels::Backend::auto_detect;
};

struct VerificationReport {
  bool pass;
  double min_g;
  double argmin_lambda;
  int grid_points;
  std::pair<double, double> window;
};

// Scan g(.; sigma2) over the certified root window on an inclusive uniform
// grid, then sharpen the worst dip by golden-section descent.  Beyond the
// window h < 0 makes 2 M(l)/l^2 monotone toward zero, so any violation that
// lives outside shows up at the window endpoint itself — which is why the
// endpoints are always grid points.
VerificationReport is_variance_proxy(const DiscreteDistribution& d, double sigma2,
                                     const GridConfig& grid = {});

// Bisection on sigma2 between Var (lower) and the Hoeffding bound
// (x_max - x_min)^2 / 4 (guaranteed proxy, upper), using is_variance_proxy as
// the predicate.  Returns the passing (upper) endpoint of the final bracket.
double bisect_optimal_proxy(const DiscreteDistribution& d, double rel_tol = 1e-6,
                            const GridConfig& grid = {});

struct CurveRow {
  double lambda;
  double g;   // g(l; s2)
  double g1;  // d/dl   = l s2 - M'(l)
  double g2;  // d2/dl2 = s2 - M''(l)
  double h;   // l M'(l) - 2 M(l)
};

std::vector<CurveRow> export_curve(const DiscreteDistribution& d, double sigma2,
                                   double lambda_min, double lambda_max, int samples,
                                   kernels::Backend backend = kernels::Backend::auto_detect);

}  // namespace subgauss
