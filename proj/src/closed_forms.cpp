#include "subgauss/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "subgauss/rootfind.hpp"

namespace subgauss {

namespace {

// Relative gate for the p1 == p2 removable singularity of the mass-ratio
// formula; inside it the exact symmetric limit is used.
constexpr double kEqualMassTol = 1e-12;

// phi(l) = p l sinh(l) - u0(l) ln u0(l) with u0(l) = 1 - 2p + 2p cosh(l).
// phi = u0 h / 2 for the unit symmetric law, so it shares sign and zeros with
// h on the positive half-line.  Beyond l = 350 the hyperbolics would
// overflow long before the root does, so the e^{-l}-scaled form (same sign)
// takes over.
double phi_symmetric(double p, double l) {
  if (l <= 350.0) {
    const double u0 = 1.0 - 2.0 * p + 2.0 * p * std::cosh(l);
    return p * l * std::sinh(l) - u0 * std::log(u0);
  }
  const double em = std::exp(-l);
  const double v = p * (1.0 + em * em) + (1.0 - 2.0 * p) * em;  // u0 e^{-l}
  return 0.5 * p * l * (1.0 - em * em) - v * (l + std::log(v));
}

// sinh(l) / u0(l), stable for large l.
double sinh_over_u0(double p, double l) {
  if (l <= 350.0)
    return std::sinh(l) / (1.0 - 2.0 * p + 2.0 * p * std::cosh(l));
  const double em = std::exp(-l);
  return (1.0 - em * em) / (2.0 * (p * (1.0 + em * em) + (1.0 - 2.0 * p) * em));
}

}  // namespace

double bernoulli_proxy(double p) {
  if (!std::isfinite(p) || !(p > 0.0 && p < 1.0))
    throw std::invalid_argument("bernoulli_proxy: p must lie in (0, 1)");
  const double num = 1.0 - 2.0 * p;
  if (std::fabs(num) < 1e-12) return 0.25;  // removable singularity at p = 1/2
  return num / (2.0 * std::log((1.0 - p) / p));
}

double binomial_proxy(int n, double p) {
  if (n < 1) throw std::invalid_argument("binomial_proxy: n must be >= 1");
  return static_cast<double>(n) * bernoulli_proxy(p);
}

double symmetric_lambda0(double p) {
  if (!std::isfinite(p) || !(p > 0.0 && p < 1.0 / 6.0))
    throw std::invalid_argument("symmetric_lambda0: p must lie in (0, 1/6)");
  const double arg = (1.0 - 4.0 * p - 4.0 * p * p) / (2.0 * p * (1.0 - 2.0 * p));
  // arg > 1 holds analytically on (0, 1/6); the clamp absorbs rounding at the
  // upper edge where arg - 1 is a few ulps.
  return std::acosh(std::max(1.0, arg));
}

ProxyResult symmetric_three_mass_proxy(double p, double a,
                                       const SolverConfig& config) {
  if (!std::isfinite(p) || !(p > 0.0 && p < 0.5))
    throw std::invalid_argument(
        "symmetric_three_mass_proxy: p must lie in (0, 1/2)");
  if (!std::isfinite(a) || !(a > 0.0))
    throw std::invalid_argument(
        "symmetric_three_mass_proxy: scale a must be positive and finite");

  ProxyResult out;
  out.method = "closed-form-symmetric-three-mass";
  out.variance = a * a * 2.0 * p;

  // The regime boundary sits at p = 1/6.  The slack keeps values that are
  // equal to 1/6 up to rounding (including double(1.0/6.0) itself, which
  // rounds below the exact rational) in the strict regime they belong to.
  const double boundary = (1.0 / 6.0) * (1.0 - 1e-12);
  if (p >= boundary) {
    out.sigma2_opt = out.variance;
    out.strict = true;
    return out;
  }

  const double l0 = symmetric_lambda0(p);
  const std::function<double(double)> phi = [p](double l) {
    return phi_symmetric(p, l);
  };

  // h > 0 on (0, l_c) and l0 < l_c, so a seed just above l0 starts positive;
  // if rounding at the regime edge spoils that, retry closer to l0.
  double lo = l0 * (1.0 + 1e-9) + 1e-12;
  double flo = phi(lo);
  for (int k = 0; k < 8 && !(flo > 0.0); ++k) {
    lo = l0 + (lo - l0) * 0.125;
    flo = phi(lo);
  }
  if (!(flo > 0.0))
    throw SolverError(
        "symmetric_three_mass_proxy: could not seed a positive bracket above lambda0");

  double hi = std::max(2.0 * l0, l0 + 1.0);
  double fhi = phi(hi);
  int doublings = 0;
  while (fhi > 0.0) {
    if (++doublings > 60)
      throw SolverError("symmetric_three_mass_proxy: bracket expansion exhausted");
    hi *= 2.0;
    fhi = phi(hi);
  }

  const RootResult rr = brent_root(phi, lo, hi, flo, fhi, config.brent_rel_tol);
  const double lc = rr.x;
  const double s2_unit = 2.0 * p * sinh_over_u0(p, lc) / lc;
  const double upper = (1.0 - 2.0 * p) * (1.0 - 2.0 * p) / (4.0 * (1.0 - 4.0 * p));
  if (!(2.0 * p < s2_unit && s2_unit < upper))
    throw SolverError(
        "symmetric_three_mass_proxy: solution escaped the regime bounds");

  out.sigma2_opt = a * a * s2_unit;
  // Near the regime boundary l_c collapses toward 0; classification is only
  // meaningful (and permitted) outside the zero-exclusion radius.
  if (lc / a > config.zero_exclusion_scale / (2.0 * a)) {
    const DiscreteDistribution d =
        new_discrete({-a, 0.0, a}, {p, 1.0 - 2.0 * p, p});
    out.candidates.push_back(classify_candidate(d, -lc / a, config));
    out.candidates.push_back(classify_candidate(d, lc / a, config));
  }
  out.strict = out.sigma2_opt <= out.variance * (1.0 + kStrictSlack);
  return out;
}

ProxyResult asymmetric_three_mass_proxy(const ThreeMassParams& params,
                                        const SolverConfig& config) {
  const double p1 = params.p1, p2 = params.p2, a = params.a;
  if (!std::isfinite(p1) || !std::isfinite(p2) || !(p1 > 0.0) || !(p2 > 0.0) ||
      p1 + p2 > 1.0 + 1e-15)
    throw std::invalid_argument(
        "asymmetric_three_mass_proxy: need p1 > 0, p2 > 0, p1 + p2 <= 1");
  if (!std::isfinite(a) || !(a > 0.0))
    throw std::invalid_argument(
        "asymmetric_three_mass_proxy: scale a must be positive and finite");
  const double p3 = std::max(0.0, 1.0 - p1 - p2);

  // All mass on the two extremes: a shifted, rescaled Bernoulli.
  if (p3 <= 1e-14) {
    ProxyResult out;
    out.method = "closed-form-bernoulli";
    const DiscreteDistribution d = new_discrete({-a, a}, {p1, p2});
    out.variance = variance(d);
    out.sigma2_opt = 4.0 * a * a * bernoulli_proxy(p2 / (p1 + p2));
    out.strict = out.sigma2_opt <= out.variance * (1.0 + kStrictSlack);
    return out;
  }

  // Equal masses: the ratio formula is 0/0; the symmetric law is the limit.
  if (std::fabs(p2 - p1) < kEqualMassTol * (p1 + p2))
    return symmetric_three_mass_proxy(0.5 * (p1 + p2), a, config);

  // Work with the heavier mass at +1 and mirror back at the end.
  const bool mirrored = p1 > p2;
  const double q1 = std::min(p1, p2);
  const double q2 = std::max(p1, p2);

  const DiscreteDistribution unit = new_discrete({-1.0, 0.0, 1.0}, {q1, p3, q2});
  const double var_unit = variance(unit);
  const double lam_hat = -std::log(q2 / q1);
  // s at lam_hat: always a root of h, hence a lower bound on the optimum.
  const double ratio_bound = 2.0 * (q2 - q1) / std::log(q2 / q1);
  const double eps0 = config.zero_exclusion_scale / 2.0;  // unit support range 2

  ProxyResult out;
  double s2_unit = std::max(ratio_bound, var_unit);

  if (p3 <= 4.0 * std::sqrt(q1 * q2) * (1.0 + 1e-12)) {
    // Heavy-extremes regime: the ratio tangency is the optimum.
    out.method = "closed-form-three-mass";
    if (std::fabs(lam_hat) > eps0)
      out.candidates.push_back(classify_candidate(unit, lam_hat, config));
  } else {
    // Sparse-center regime: further tangencies can appear (on the same
    // half-line as lam_hat as well), so enumerate every root of h and let
    // each local minimum compete; the ratio bound stays in the max.
    out.method = "closed-form-three-mass";
    const auto window = search_window(unit, &out.diagnostics);
    const std::vector<double> roots =
        find_h_roots(unit, window, config, &out.diagnostics);
    out.diagnostics.backend = kernels::backend_name(config.backend);
    for (const double r : roots) {
      CandidatePoint cp = classify_candidate(unit, r, config);
      if (cp.is_local_min) s2_unit = std::max(s2_unit, cp.s_c);
      out.candidates.push_back(cp);
    }
  }

  out.variance = a * a * var_unit;
  out.sigma2_opt = a * a * s2_unit;
  for (CandidatePoint& cp : out.candidates) {
    cp.lambda_c = (mirrored ? -cp.lambda_c : cp.lambda_c) / a;
    cp.s_c *= a * a;
    cp.g2_at_candidate *= a * a;
  }
  if (mirrored) {
    std::sort(out.candidates.begin(), out.candidates.end(),
              [](const CandidatePoint& l, const CandidatePoint& r) {
                return l.lambda_c < r.lambda_c;
              });
    const double wlo = out.diagnostics.window_lo, whi = out.diagnostics.window_hi;
    out.diagnostics.window_lo = -whi / a;
    out.diagnostics.window_hi = -wlo / a;
    for (double& t : out.diagnostics.tangential_points) t = -t / a;
    std::sort(out.diagnostics.tangential_points.begin(),
              out.diagnostics.tangential_points.end());
  } else if (a != 1.0) {
    out.diagnostics.window_lo /= a;
    out.diagnostics.window_hi /= a;
    for (double& t : out.diagnostics.tangential_points) t /= a;
  }
  out.strict = out.sigma2_opt <= out.variance * (1.0 + kStrictSlack);
  return out;
}

ProxyResult discrete_uniform_proxy(int N, double a, double b) {
  if (N < 1) throw std::invalid_argument("discrete_uniform_proxy: N must be >= 1");
  if (!std::isfinite(a) || a == 0.0 || !std::isfinite(b))
    throw std::invalid_argument(
        "discrete_uniform_proxy: a must be nonzero and finite, b finite");
  ProxyResult out;
  out.method = "closed-form-uniform";
  const double n = static_cast<double>(N);
  out.sigma2_opt = a * a * (n * n - 1.0) / 12.0;
  out.variance = out.sigma2_opt;
  out.strict = true;
  return out;
}

}  // namespace subgauss
