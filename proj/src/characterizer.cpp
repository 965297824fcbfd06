#include "subgauss/characterizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "subgauss/rootfind.hpp"

namespace subgauss {

namespace {

// ============================================================================
// Hybrid evaluation of h(l) = l M'(l) - 2 M(l)
// ============================================================================
// Direct evaluation loses all relative accuracy as l -> 0: the true value
// decays like l^3 (h = (k3/6) l^3 + (k4/12) l^4 + ...) while the roundoff
// floor of the log-sum-exp stays flat at a few ulps, so below a radius the
// sign of the direct form is meaningless.  Inside that radius we use the
// two-term cumulant expansion instead; its truncation error is O((l y_max)^2)
// relative, far below the direct form's noise there.
struct HEvaluator {
  const DiscreteDistribution& d;
  std::vector<double> y;  // centered atoms, ascending
  double y_min = 0.0, y_max = 0.0;
  double k3 = 0.0, k4 = 0.0;  // third and fourth cumulants
  double taylor_radius = 0.0;

  explicit HEvaluator(const DiscreteDistribution& dist) : d(dist) {
    const double mu = mean(d);
    y.resize(d.size());
    double max_abs = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      y[i] = d.atoms[i] - mu;
      max_abs = std::max(max_abs, std::fabs(y[i]));
    }
    y_min = y.front();
    y_max = y.back();
    const double var = variance(d);
    k3 = central_moment(d, 3);
    k4 = central_moment(d, 4) - 3.0 * var * var;
    taylor_radius = 0.02 / max_abs;
  }

  double taylor(double l) const {
    return (k3 / 6.0 + (k4 / 12.0) * l) * l * l * l;
  }
  double at(double l) const {
    return std::fabs(l) <= taylor_radius ? taylor(l) : h_eval(d, l);
  }
};

// Newton sharpening on the direct form for roots that sit inside the Taylor
// radius; h'(l) = l M''(l) - M'(l).  Steps larger than a quarter of |l| mean
// the direct form is still noise-dominated there, so they are rejected and
// the Brent/Taylor location stands (the candidate value s(l) is stationary at
// the root, so the residual location error only enters s at second order).
double polish_near_zero(const DiscreteDistribution& d, double r) {
  for (int it = 0; it < 4; ++it) {
    const CgfDerivatives c = cgf_at(d, r);
    const double hv = r * c.m1 - 2.0 * c.m0;
    const double hp = r * c.m2 - c.m1;
    if (hp == 0.0) break;
    const double step = hv / hp;
    if (!(std::fabs(step) <= 0.25 * std::fabs(r))) break;
    r -= step;
    if (std::fabs(step) <= 1e-12 * std::fabs(r)) break;
  }
  return r;
}

// Scan grid over [window_lo, -eps0] and [eps0, window_hi]: per-side uniform
// coverage proportional to width, plus log-spaced points per side so roots
// just outside the exclusion radius are not missed by a coarse uniform step.
std::vector<double> build_grid(std::pair<double, double> window, double eps0,
                               std::size_t n_atoms, const SolverConfig& config) {
  const double lo = window.first, hi = window.second;
  const double width_neg = -eps0 - lo;
  const double width_pos = hi - eps0;
  const double base_d =
      std::max(1024.0, 64.0 * static_cast<double>(n_atoms)) * config.scan_density;
  const int base = std::max(64, static_cast<int>(std::llround(base_d)));
  const int n_neg = std::max(
      32, static_cast<int>(std::llround(base * width_neg / (width_neg + width_pos))));
  const int n_pos = std::max(32, base - n_neg);

  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n_neg + n_pos) +
               2 * static_cast<std::size_t>(config.near_zero_log_points));
  grid.push_back(lo);
  for (int j = 1; j + 1 < n_neg; ++j)
    grid.push_back(lo + width_neg * j / (n_neg - 1));
  grid.push_back(-eps0);
  grid.push_back(eps0);
  for (int j = 1; j + 1 < n_pos; ++j)
    grid.push_back(eps0 + width_pos * j / (n_pos - 1));
  grid.push_back(hi);

  const int P = config.near_zero_log_points;
  if (P >= 2) {
    for (int j = 1; j + 1 < P; ++j) {
      const double t = static_cast<double>(j) / (P - 1);
      grid.push_back(eps0 * std::pow(hi / eps0, t));
      grid.push_back(-eps0 * std::pow(-lo / eps0, t));
    }
  }

  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double u, double v) {
                           return std::fabs(v - u) <=
                                  4e-16 * std::max(std::fabs(u), std::fabs(v));
                         }),
             grid.end());
  return grid;
}

}  // namespace

std::pair<double, double> search_window(const DiscreteDistribution& d,
                                        Diagnostics* diag) {
  if (d.size() < 2)
    throw std::invalid_argument("search_window: need at least two atoms");
  const double mu = mean(d);
  const double w_bot = d.weights.front();  // mass at x_min
  const double w_top = d.weights.back();   // mass at x_max
  // At the proposed edge, h(l) ~ -|l| (x_edge - mu) - 2 ln w_edge = -40:
  // safely negative, and h stays negative beyond because the tilted law
  // concentrates on the extreme atom.
  int doublings = 0;
  const auto expand = [&](double edge) {
    while (h_eval(d, edge) >= 0.0) {
      if (++doublings > 60)
        throw SolverError("search_window: expansion exhausted without h < 0");
      edge *= 2.0;
    }
    return edge;
  };
  const double hi = expand((2.0 * std::log(1.0 / w_top) + 40.0) / (d.x_max() - mu));
  const double lo = expand(-(2.0 * std::log(1.0 / w_bot) + 40.0) / (mu - d.x_min()));
  if (diag) {
    diag->window_lo = lo;
    diag->window_hi = hi;
    diag->window_doublings = doublings;
  }
  return {lo, hi};
}

std::vector<double> find_h_roots(const DiscreteDistribution& d,
                                 std::pair<double, double> window,
                                 const SolverConfig& config, Diagnostics* diag) {
  if (d.size() < 2)
    throw std::invalid_argument("find_h_roots: need at least two atoms");
  const double range = d.x_max() - d.x_min();
  const double eps0 = config.zero_exclusion_scale / range;
  if (!(window.first < -eps0 && window.second > eps0))
    throw std::invalid_argument(
        "find_h_roots: window must extend past the zero-exclusion radius on both sides");

  const HEvaluator he(d);
  const std::vector<double> grid = build_grid(window, eps0, d.size(), config);
  const std::size_t K = grid.size();

  std::vector<double> m0(K), m1(K), hv(K);
  kernels::cgf_grid(he.y.data(), d.weights.data(), d.size(), he.y_min, he.y_max,
                    grid.data(), K, m0.data(), m1.data(), nullptr, config.backend);
  for (std::size_t i = 0; i < K; ++i) {
    hv[i] = std::fabs(grid[i]) <= he.taylor_radius ? he.taylor(grid[i])
                                                   : grid[i] * m1[i] - 2.0 * m0[i];
  }

  const std::function<double(double)> f = [&he](double l) { return he.at(l); };
  std::vector<double> roots;
  int brackets = 0;
  long brent_iters = 0;
  for (std::size_t i = 0; i + 1 < K; ++i) {
    if (grid[i] < 0.0 && grid[i + 1] > 0.0) continue;  // spans the excluded origin
    if (hv[i] == 0.0) {
      // Exact grid zero: accept only a genuine crossing through this point.
      if (i > 0 && hv[i - 1] * hv[i + 1] < 0.0 && !(grid[i - 1] < 0.0 && grid[i + 1] > 0.0))
        roots.push_back(grid[i]);
      continue;
    }
    if (hv[i] * hv[i + 1] < 0.0) {
      ++brackets;
      const RootResult rr = brent_root(f, grid[i], grid[i + 1], hv[i], hv[i + 1],
                                       config.brent_rel_tol);
      brent_iters += rr.iterations;
      double r = rr.x;
      if (std::fabs(r) <= he.taylor_radius) r = polish_near_zero(d, r);
      if (std::fabs(r) > eps0) roots.push_back(r);
    }
  }

  // Tangential contacts: dips of |h| that do not cross zero.  Genuine ones
  // (s touches its bound without crossing) are promoted to roots; near misses
  // are reported through diagnostics so a caller can inspect them.
  double scale = 1.0;
  for (double v : hv) scale = std::max(scale, std::fabs(v));
  for (std::size_t i = 1; i + 1 < K; ++i) {
    if (grid[i - 1] < 0.0 && grid[i + 1] > 0.0) continue;
    const bool same_sign = (hv[i - 1] > 0.0 && hv[i] > 0.0 && hv[i + 1] > 0.0) ||
                           (hv[i - 1] < 0.0 && hv[i] < 0.0 && hv[i + 1] < 0.0);
    if (!same_sign) continue;
    if (!(std::fabs(hv[i]) < std::fabs(hv[i - 1]) &&
          std::fabs(hv[i]) <= std::fabs(hv[i + 1])))
      continue;
    if (!(std::fabs(hv[i]) < 1e-6 * scale)) continue;
    const std::function<double(double)> absf = [&he](double l) {
      return std::fabs(he.at(l));
    };
    const MinResult mr = golden_min(absf, grid[i - 1], grid[i + 1], 64);
    if (std::fabs(mr.fx) < 1e-13 * scale) {
      if (std::fabs(mr.x) > eps0) roots.push_back(mr.x);
    } else if (diag) {
      diag->tangential_points.push_back(mr.x);
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  out.reserve(roots.size());
  for (double r : roots) {
    if (!out.empty() &&
        std::fabs(r - out.back()) <=
            10.0 * config.brent_rel_tol * std::max(std::fabs(r), std::fabs(out.back())))
      continue;
    out.push_back(r);
  }

  if (diag) {
    diag->scan_samples = static_cast<int>(K);
    diag->brackets_examined = brackets;
    diag->brent_iterations += brent_iters;
  }
  return out;
}

CandidatePoint classify_candidate(const DiscreteDistribution& d, double lambda_c,
                                  const SolverConfig& config) {
  if (d.size() < 2)
    throw std::invalid_argument("classify_candidate: need at least two atoms");
  const double eps0 = config.zero_exclusion_scale / (d.x_max() - d.x_min());
  if (!(std::fabs(lambda_c) > eps0))
    throw std::invalid_argument(
        "classify_candidate: lambda lies inside the zero-exclusion radius");

  const CgfDerivatives c = cgf_at(d, lambda_c);
  const double s_c = c.m1 / lambda_c;  // positive: M' shares the sign of lambda
  const double g2 = s_c - c.m2;
  const double tau2 = config.classify_tol_scale * s_c;

  bool is_min;
  if (g2 > tau2) {
    is_min = true;
  } else if (g2 < -tau2) {
    is_min = false;
  } else {
    // Curvature too flat to trust: sample g(.; s_c) around the point at three
    // relative offsets; a local minimum must not dip below the center value.
    const double g0 = g_eval(d, lambda_c, s_c);
    is_min = true;
    for (const double delta : {1e-4, 1e-3, 1e-2}) {
      const double dl = delta * std::fabs(lambda_c);
      if (g_eval(d, lambda_c - dl, s_c) < g0 - 1e-14 ||
          g_eval(d, lambda_c + dl, s_c) < g0 - 1e-14) {
        is_min = false;
        break;
      }
    }
  }
  return {lambda_c, s_c, is_min, g2};
}

ProxyResult optimal_proxy_general(const DiscreteDistribution& d,
                                  const SolverConfig& config) {
  ProxyResult out;
  out.method = "general-engine";
  out.diagnostics.backend = kernels::backend_name(config.backend);
  if (d.size() == 1) {
    out.sigma2_opt = 0.0;
    out.variance = 0.0;
    out.strict = true;
    return out;
  }
  const auto window = search_window(d, &out.diagnostics);
  const std::vector<double> roots = find_h_roots(d, window, config, &out.diagnostics);
  out.variance = variance(d);
  double best = out.variance;
  out.candidates.reserve(roots.size());
  for (const double r : roots) {
    CandidatePoint cp = classify_candidate(d, r, config);
    if (cp.is_local_min) best = std::max(best, cp.s_c);
    out.candidates.push_back(cp);
  }
  out.sigma2_opt = best;
  out.strict = out.sigma2_opt <= out.variance * (1.0 + kStrictSlack);
  return out;
}

}  // namespace subgauss
