#pragma once
// General-purpose computation of the optimal sub-Gaussian variance proxy:
// locate the nonzero roots of h(l) = l M'(l) - 2 M(l), keep the roots where
// g(.; s_c) with s_c = M'(l_c)/l_c has a local minimum, and return
// sigma2_opt = max(Var, sup of the surviving s_c).

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subgauss/distribution.hpp"
#include "subgauss/kernels.hpp"

namespace subgauss {

struct SolverConfig {
  double scan_density = 1.0;           // multiplies the base sample count max(1024, 64 N)
  double brent_rel_tol = 1e-12;        // root refinement tolerance, relative to |lambda|
  double zero_exclusion_scale = 1e-4;  // eps0 = scale / (x_max - x_min)
  double classify_tol_scale = 1e-10;   // tau2 = scale * s_c in the g'' sign test
  int near_zero_log_points = 48;       // log-spaced samples per half-line, eps0 .. window edge
  kernels::Backend backend = kernels::Backend::auto_detect;
};

struct CandidatePoint {
  double lambda_c;         // nonzero root of h, outside the zero-exclusion radius
  double s_c;              // M'(lambda_c)/lambda_c, the candidate proxy value
  bool is_local_min;       // whether g(.; s_c) attains a local minimum at lambda_c
  double g2_at_candidate;  // g''(lambda_c; s_c) = s_c - M''(lambda_c), diagnostic
};

struct Diagnostics {
  double window_lo = 0.0;
  double window_hi = 0.0;
  int window_doublings = 0;
  int scan_samples = 0;
  int brackets_examined = 0;
  long brent_iterations = 0;
  std::vector<double> tangential_points;  // |h| dips that touch zero without crossing
  std::string backend;
};

struct ProxyResult {
  double sigma2_opt = 0.0;
  double variance = 0.0;
  bool strict = true;  // sigma2_opt <= variance * (1 + kStrictSlack)
  std::vector<CandidatePoint> candidates;
  std::string method;  // "general-engine", "closed-form-<family>", or "oracle"
  Diagnostics diagnostics;
};

// Raised when an iterative stage cannot complete (window expansion exhausted,
// bracket not found, ...).  Distinct from std::invalid_argument so the CLI can
// map input errors and solver failures to different exit codes.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kStrictSlack = 1e-9;

// Window [lo, hi] certified to contain every nonzero root of h: beyond it
// h < 0.  Endpoints are doubled (at most 60 times each) while h >= 0 there.
std::pair<double, double> search_window(const DiscreteDistribution& d,
                                        Diagnostics* diag = nullptr);

// All sign-change roots of h inside the window, excluding |l| <= eps0 where
// the trivial root at 0 dominates the floating-point picture.  Sorted
// ascending.  Tangential contacts are refined and either promoted to roots or
// reported through diag->tangential_points.
std::vector<double> find_h_roots(const DiscreteDistribution& d,
                                 std::pair<double, double> window,
                                 const SolverConfig& config = {},
                                 Diagnostics* diag = nullptr);

// Evaluate s_c and decide whether lambda_c is a local minimum of g(.; s_c):
// primarily by the sign of g'' against tau2, with direct sampling of g at
// lambda_c (1 +- {1e-4, 1e-3, 1e-2}) as the tie-breaker when |g''| <= tau2.
CandidatePoint classify_candidate(const DiscreteDistribution& d, double lambda_c,
                                  const SolverConfig& config = {});

// The full pipeline.  A single atom yields sigma2_opt = 0, strict = true.
ProxyResult optimal_proxy_general(const DiscreteDistribution& d,
                                  const SolverConfig& config = {});

}  // namespace subgauss
