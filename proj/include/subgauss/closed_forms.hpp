#pragma once
// Exact and semianalytic optimal variance proxies for the solved families:
// Bernoulli, binomial, symmetric and asymmetric three-mass laws on {-a, 0, a},
// and the discrete uniform.

#include "subgauss/characterizer.hpp"

namespace subgauss {

struct ThreeMassParams {
  double p1;       // mass at -a
  double p2;       // mass at +a
  double a = 1.0;  // scale; the mass at 0 is p3 = 1 - p1 - p2
};

// (1 - 2p) / (2 ln((1-p)/p)) for p != 1/2, with the removable singularity at
// p = 1/2 filled by its limit 1/4.  Symmetric under p <-> 1 - p.
double bernoulli_proxy(double p);

// A binomial(n, p) variable is an i.i.d. sum of n Bernoulli(p) variables and
// its centered CGF is n times the single-trial one, so the proxy scales by n.
double binomial_proxy(int n, double p);

// lambda0 = arcosh((1 - 4p - 4p^2) / (2p (1 - 2p))), defined for p in
// (0, 1/6): the left edge of the bracket holding the critical lambda of the
// non-strict symmetric regime.
double symmetric_lambda0(double p);

// Symmetric three-mass law {-a, 0, a} with masses {p, 1-2p, p}.
// p >= 1/6: strictly sub-Gaussian, sigma2_opt = Var = 2 a^2 p.
// p <  1/6: sigma2_opt = a^2 2p sinh(l_c) / (l_c u0(l_c)) where l_c > lambda0
// solves p l sinh(l) = u0(l) ln u0(l), u0(l) = 1 - 2p + 2p cosh(l).
ProxyResult symmetric_three_mass_proxy(double p, double a = 1.0,
                                       const SolverConfig& config = {});

// Asymmetric three-mass law {-a, 0, a} with masses {p1, p3, p2}.
// With q2 >= q1 standing for the ordered pair, the value
// 2 (q2 - q1)/ln(q2/q1) is always carried by the root -ln(q2/q1) of h.
// When p3 <= 4 sqrt(p1 p2) that bound is the exact optimum; beyond it,
// additional tangencies can appear on either half-line and every local
// minimum found by the root scan competes in the max.
ProxyResult asymmetric_three_mass_proxy(const ThreeMassParams& params,
                                        const SolverConfig& config = {});

// Uniform law on {a + b, 2a + b, ..., N a + b}: always strictly sub-Gaussian
// with sigma2_opt = Var = a^2 (N^2 - 1) / 12.
ProxyResult discrete_uniform_proxy(int N, double a = 1.0, double b = 0.0);

}  // namespace subgauss
