#include "subgauss/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "subgauss/rootfind.hpp"

namespace subgauss {

namespace {

struct CenteredView {
  std::vector<double> y;
  double y_min, y_max;

  explicit CenteredView(const DiscreteDistribution& d) {
    const double mu = mean(d);
    y.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) y[i] = d.atoms[i] - mu;
    y_min = y.front();
    y_max = y.back();
  }
};

}  // namespace

VerificationReport is_variance_proxy(const DiscreteDistribution& d, double sigma2,
                                     const GridConfig& grid) {
  if (!std::isfinite(sigma2) || !(sigma2 >= 0.0))
    throw std::invalid_argument(
        "is_variance_proxy: sigma2 must be finite and nonnegative");
  if (grid.grid_points < 3)
    throw std::invalid_argument("is_variance_proxy: grid_points must be >= 3");

  VerificationReport rep;
  rep.grid_points = grid.grid_points;
  if (d.size() == 1) {
    // g(l; s2) = s2 l^2 / 2 >= 0: every nonnegative value is a proxy.
    rep.pass = true;
    rep.min_g = 0.0;
    rep.argmin_lambda = 0.0;
    rep.window = {0.0, 0.0};
    return rep;
  }

  // Beyond the window h < 0, so 2 M(l)/l^2 decreases toward the tails and any
  // violation out there reaches its deepest point at the window endpoint —
  // which the inclusive grid always contains.
  const auto window = search_window(d);
  rep.window = window;

  const std::size_t K = static_cast<std::size_t>(grid.grid_points);
  std::vector<double> lam(K), m0(K);
  const double step = (window.second - window.first) / static_cast<double>(K - 1);
  for (std::size_t i = 0; i < K; ++i)
    lam[i] = window.first + step * static_cast<double>(i);
  lam[K - 1] = window.second;

  const CenteredView cv(d);
  kernels::cgf_grid(cv.y.data(), d.weights.data(), d.size(), cv.y_min, cv.y_max,
                    lam.data(), K, m0.data(), nullptr, nullptr, grid.backend);

  std::size_t best = 0;
  double best_g = 0.5 * lam[0] * lam[0] * sigma2 - m0[0];
  for (std::size_t i = 1; i < K; ++i) {
    const double g = 0.5 * lam[i] * lam[i] * sigma2 - m0[i];
    if (g < best_g) {
      best_g = g;
      best = i;
    }
  }

  // Sharpen the worst dip between the argmin's grid neighbors.
  const double a = lam[best > 0 ? best - 1 : 0];
  const double b = lam[best + 1 < K ? best + 1 : K - 1];
  const std::function<double(double)> f = [&d, sigma2](double l) {
    return g_eval(d, l, sigma2);
  };
  const MinResult mr = golden_min(f, a, b, grid.golden_iters);

  if (mr.fx < best_g) {
    rep.min_g = mr.fx;
    rep.argmin_lambda = mr.x;
  } else {
    rep.min_g = best_g;
    rep.argmin_lambda = lam[best];
  }
  rep.pass = rep.min_g >= -grid.tol_violation_scale * std::max(1.0, sigma2);
  return rep;
}

double bisect_optimal_proxy(const DiscreteDistribution& d, double rel_tol,
                            const GridConfig& grid) {
  if (!(rel_tol >= 1e-10))
    throw std::invalid_argument("bisect_optimal_proxy: rel_tol must be >= 1e-10");
  if (d.size() == 1) return 0.0;

  double lo = variance(d);
  if (is_variance_proxy(d, lo, grid).pass) return lo;  // strictly sub-Gaussian

  // Hoeffding's lemma: (range/2)^2 is always a proxy.
  const double range = d.x_max() - d.x_min();
  double hi = 0.25 * range * range;
  int expansions = 0;
  while (!is_variance_proxy(d, hi, grid).pass) {
    if (++expansions > 60)
      throw SolverError("bisect_optimal_proxy: no passing upper bracket found");
    hi *= 2.0;
  }

  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (is_variance_proxy(d, mid, grid).pass)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::vector<CurveRow> export_curve(const DiscreteDistribution& d, double sigma2,
                                   double lambda_min, double lambda_max,
                                   int samples, kernels::Backend backend) {
  if (!std::isfinite(sigma2) || !(sigma2 >= 0.0))
    throw std::invalid_argument("export_curve: sigma2 must be finite and nonnegative");
  if (samples < 2) throw std::invalid_argument("export_curve: samples must be >= 2");
  if (!(lambda_min < lambda_max) || !std::isfinite(lambda_min) ||
      !std::isfinite(lambda_max))
    throw std::invalid_argument("export_curve: need finite lambda_min < lambda_max");

  const std::size_t K = static_cast<std::size_t>(samples);
  std::vector<double> lam(K), m0(K), m1(K), m2(K);
  const double step = (lambda_max - lambda_min) / static_cast<double>(K - 1);
  for (std::size_t i = 0; i < K; ++i)
    lam[i] = lambda_min + step * static_cast<double>(i);
  lam[K - 1] = lambda_max;

  const CenteredView cv(d);
  kernels::cgf_grid(cv.y.data(), d.weights.data(), d.size(), cv.y_min, cv.y_max,
                    lam.data(), K, m0.data(), m1.data(), m2.data(), backend);

  std::vector<CurveRow> rows(K);
  for (std::size_t i = 0; i < K; ++i) {
    const double l = lam[i];
    rows[i] = {l, 0.5 * l * l * sigma2 - m0[i], l * sigma2 - m1[i],
               sigma2 - m2[i], l * m1[i] - 2.0 * m0[i]};
  }
  return rows;
}

}  // namespace subgauss
