#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "subgauss/characterizer.hpp"
#include "subgauss/distribution.hpp"

using namespace subgauss;

namespace {

DiscreteDistribution three_mass(double p1, double p2) {
  return new_discrete({-1.0, 0.0, 1.0}, {p1, 1.0 - p1 - p2, p2});
}

}  // namespace

// ============================================================================
// Search window
// ============================================================================

TEST_CASE("search_window brackets every critical point and certifies decay") {
  const auto d = three_mass(0.05, 0.01);
  Diagnostics diag;
  const auto w = search_window(d, &diag);
  CHECK(w.first < -5.81);
  CHECK(w.second > 8.70);
  // Beyond the window h must already be negative (that is the certificate).
  CHECK(h_eval(d, w.first) < 0.0);
  CHECK(h_eval(d, w.second) < 0.0);
  CHECK(diag.window_lo == w.first);
  CHECK(diag.window_hi == w.second);
  CHECK(diag.window_doublings >= 0);
  CHECK_THROWS_AS(search_window(new_discrete({1.0}, {1.0})),
                  std::invalid_argument);
}

// ============================================================================
// Root finding on h
// ============================================================================

TEST_CASE("find_h_roots recovers the three-root structure of (0.05, 0.01)") {
  const auto d = three_mass(0.05, 0.01);
  const auto roots = find_h_roots(d, search_window(d));
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(-5.8006235298523276).epsilon(1e-9));
  CHECK(roots[1] == doctest::Approx(1.6094379124341004).epsilon(1e-9));
  CHECK(roots[2] == doctest::Approx(8.6967822831787187).epsilon(1e-9));
  // The middle root sits exactly at ln(p3 / (2 p2)) for this family.
  CHECK(roots[1] == doctest::Approx(std::log(5.0)).epsilon(1e-9));
}

TEST_CASE("find_h_roots sees a single contact for (0.13, 0.25)") {
  const auto d = three_mass(0.13, 0.25);
  const auto roots = find_h_roots(d, search_window(d));
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == doctest::Approx(-0.65392646740666401).epsilon(1e-9));
  CHECK(roots[0] == doctest::Approx(-std::log(0.25 / 0.13)).epsilon(1e-9));
}

TEST_CASE("find_h_roots resolves a contact close to the excluded origin") {
  // Nearly bare flanks with a heavy center push one tangency toward 0;
  // the log-spaced near-origin samples must still separate it from the
  // excluded seam.
  const auto d = three_mass(0.003, 0.49);
  const auto roots = find_h_roots(d, search_window(d));
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(-6.9739999338548324).epsilon(1e-9));
  CHECK(roots[1] == doctest::Approx(-5.0957931024365626).epsilon(1e-9));
  CHECK(roots[2] == doctest::Approx(-0.038139120995176686).epsilon(1e-6));
}

TEST_CASE("find_h_roots finds nothing for strictly sub-Gaussian laws") {
  for (const auto& d :
       {new_discrete({-1.0, 1.0}, {0.5, 0.5}),
        new_discrete({0.0, 1.0, 2.0, 3.0, 4.0}, {0.2, 0.2, 0.2, 0.2, 0.2}),
        three_mass(0.25, 0.25)}) {
    CHECK(find_h_roots(d, search_window(d)).empty());
  }
  CHECK_THROWS_AS(find_h_roots(new_discrete({1.0}, {1.0}), {-1.0, 1.0}),
                  std::invalid_argument);
}

// ============================================================================
// Candidate classification
// ============================================================================

TEST_CASE("classify_candidate evaluates s and curvature at the contacts") {
  const auto d = three_mass(0.05, 0.01);
  {
    const auto c = classify_candidate(d, -5.8006235298523276);
    CHECK(c.s_c == doctest::Approx(0.1562203706820172).epsilon(1e-10));
    CHECK(c.is_local_min);
    CHECK(c.g2_at_candidate ==
          doctest::Approx(0.10528953448265063).epsilon(1e-6));
  }
  {
    // The middle contact touches from below: curvature is negative there.
    const auto c = classify_candidate(d, 1.6094379124341004);
    CHECK(c.s_c == doctest::Approx(0.049706794764768945).epsilon(1e-10));
    CHECK_FALSE(c.is_local_min);
    CHECK(c.g2_at_candidate ==
          doctest::Approx(-0.0086932052352310551).epsilon(1e-6));
  }
  {
    const auto c = classify_candidate(d, 8.6967822831787187);
    CHECK(c.s_c == doctest::Approx(0.11780600369535404).epsilon(1e-10));
    CHECK(c.is_local_min);
    CHECK(c.g2_at_candidate ==
          doctest::Approx(0.10257811746555866).epsilon(1e-6));
  }
}

TEST_CASE("classify_candidate rejects the excluded origin region") {
  const auto d = three_mass(0.13, 0.25);
  CHECK_THROWS_AS(classify_candidate(d, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(classify_candidate(new_discrete({1.0}, {1.0}), 1.0),
                  std::invalid_argument);
}

// ============================================================================
// Full pipeline
// ============================================================================

TEST_CASE("optimal_proxy_general solves the (0.05, 0.01) reference law") {
  const auto r = optimal_proxy_general(three_mass(0.05, 0.01));
  CHECK(r.method == "general-engine");
  CHECK(r.variance == doctest::Approx(0.0584).epsilon(1e-14));
  CHECK(r.sigma2_opt == doctest::Approx(0.1562203706820172).epsilon(1e-9));
  CHECK_FALSE(r.strict);
  REQUIRE(r.candidates.size() == 3);
  CHECK(r.candidates[0].is_local_min);
  CHECK_FALSE(r.candidates[1].is_local_min);
  CHECK(r.candidates[2].is_local_min);
  // The winning value comes from the negative-side contact, beating both the
  // variance and the positive-side local minimum.
  CHECK(r.sigma2_opt == doctest::Approx(r.candidates[0].s_c).epsilon(1e-15));
  CHECK(r.candidates[2].s_c ==
        doctest::Approx(0.11780600369535404).epsilon(1e-9));
}

TEST_CASE("optimal_proxy_general solves the (0.13, 0.25) reference law") {
  const auto r = optimal_proxy_general(three_mass(0.13, 0.25));
  CHECK(r.variance == doctest::Approx(0.3656).epsilon(1e-14));
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.candidates[0].lambda_c ==
        doctest::Approx(-0.65392646740666401).epsilon(1e-9));
  CHECK(r.sigma2_opt ==
        doctest::Approx(0.24 / std::log(25.0 / 13.0)).epsilon(1e-10));
  CHECK_FALSE(r.strict);
}

TEST_CASE("a sparse-flank three-mass law carries two local minima on one "
          "half-line") {
  // (0.003, 0.49) puts a second, near-origin tangency on the negative axis;
  // the optimum lives there, just above the variance.
  const auto r = optimal_proxy_general(three_mass(0.003, 0.49));
  REQUIRE(r.candidates.size() == 3);
  int neg_minima = 0;
  for (const auto& c : r.candidates) {
    if (c.lambda_c < 0 && c.is_local_min) ++neg_minima;
  }
  CHECK(neg_minima == 2);
  CHECK(r.candidates[0].s_c ==
        doctest::Approx(0.19360523164839456).epsilon(1e-9));
  CHECK_FALSE(r.candidates[1].is_local_min);
  CHECK(r.sigma2_opt == doctest::Approx(0.25584542454100584).epsilon(1e-8));
  CHECK(r.sigma2_opt > r.variance);
}

TEST_CASE("optimal_proxy_general solves a five-atom law") {
  const auto d = new_discrete({-2.0, -0.5, 0.25, 1.0, 3.0},
                              {0.1, 0.25, 0.3, 0.2, 0.15});
  const auto r = optimal_proxy_general(d);
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.candidates[0].lambda_c ==
        doctest::Approx(0.74629837739115857).epsilon(1e-9));
  CHECK(r.sigma2_opt == doctest::Approx(2.0499141863309126).epsilon(1e-10));
  CHECK(r.candidates[0].g2_at_candidate ==
        doctest::Approx(0.22203706618921744).epsilon(1e-6));
  CHECK_FALSE(r.strict);
}

TEST_CASE("optimal_proxy_general flags strict laws and degenerate input") {
  const auto rad = optimal_proxy_general(new_discrete({-1.0, 1.0}, {0.5, 0.5}));
  CHECK(rad.sigma2_opt == 1.0);
  CHECK(rad.strict);
  CHECK(rad.candidates.empty());

  std::vector<double> atoms, weights;
  for (int i = 1; i <= 10; ++i) {
    atoms.push_back(i);
    weights.push_back(0.1);
  }
  const auto uni = optimal_proxy_general(new_discrete(atoms, weights));
  CHECK(uni.sigma2_opt == doctest::Approx(8.25).epsilon(1e-14));
  CHECK(uni.strict);
  CHECK(uni.candidates.empty());

  const auto single = optimal_proxy_general(new_discrete({3.0}, {1.0}));
  CHECK(single.sigma2_opt == 0.0);
  CHECK(single.variance == 0.0);
  CHECK(single.strict);
  CHECK(single.candidates.empty());
}

TEST_CASE("optimal_proxy_general matches the two-point closed form") {
  // Bernoulli on {0, 1}: the engine must land on the known optimum.
  const auto d = new_discrete({0.0, 1.0}, {0.9, 0.1});
  const auto r = optimal_proxy_general(d);
  CHECK(r.sigma2_opt == doctest::Approx(0.18204784532536748).epsilon(1e-12));
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.candidates[0].is_local_min);
}

TEST_CASE("optimal_proxy_general is stable under scan density changes") {
  const auto d = three_mass(0.003, 0.49);
  SolverConfig dense;
  dense.scan_density = 2.5;
  const auto base = optimal_proxy_general(d);
  const auto fine = optimal_proxy_general(d, dense);
  CHECK(base.sigma2_opt == doctest::Approx(fine.sigma2_opt).epsilon(1e-10));
  CHECK(base.candidates.size() == fine.candidates.size());
}

TEST_CASE("diagnostics record the scan effort and backend") {
  const auto d = three_mass(0.05, 0.01);
  const auto r = optimal_proxy_general(d);
  CHECK(r.diagnostics.scan_samples > 1000);
  CHECK(r.diagnostics.brackets_examined >= 3);
  CHECK(r.diagnostics.brent_iterations > 0);
  CHECK((r.diagnostics.backend == "scalar" || r.diagnostics.backend == "avx2"));
  CHECK(r.diagnostics.window_lo < 0.0);
  CHECK(r.diagnostics.window_hi > 0.0);
}
