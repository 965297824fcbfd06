#include "subgauss/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace subgauss {

namespace {

// Weights this far below zero are treated as sign noise from user rounding
// and clamped to zero; anything more negative is rejected as malformed.
constexpr double kNegativeWeightGate = 1e-9;

// Atoms closer than this fraction of the support range are merged; exact
// distinctness under floating point is too fragile a requirement.
constexpr double kMergeScale = 1e-12;

}  // namespace

DiscreteDistribution new_discrete(std::vector<double> atoms,
                                  std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw std::invalid_argument(
        "new_discrete: atoms and weights must have the same nonzero length");
  for (double x : atoms)
    if (!std::isfinite(x))
      throw std::invalid_argument("new_discrete: non-finite atom");
  for (double& w : weights) {
    if (!std::isfinite(w) || w < -kNegativeWeightGate)
      throw std::invalid_argument("new_discrete: weights must be nonnegative");
    w = std::max(w, 0.0);
  }

  // Sort jointly by atom position.
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return atoms[i] < atoms[j]; });

  const double range = atoms[order.back()] - atoms[order.front()];
  const double merge_tol = kMergeScale * range;

  DiscreteDistribution d;
  d.atoms.reserve(atoms.size());
  d.weights.reserve(atoms.size());
  for (std::size_t idx : order) {
    if (!d.atoms.empty() && atoms[idx] - d.atoms.back() <= merge_tol) {
      d.weights.back() += weights[idx];  // duplicate atom: merge masses
    } else {
      d.atoms.push_back(atoms[idx]);
      d.weights.push_back(weights[idx]);
    }
  }

  const double total = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
  if (!(total > 0.0))
    throw std::invalid_argument("new_discrete: at least one weight must be positive");
  for (double& w : d.weights) w /= total;

  // Prune zero-mass atoms after the merge so the positivity invariant holds.
  std::size_t kept = 0;
  for (std::size_t i = 0; i < d.atoms.size(); ++i) {
    if (d.weights[i] > 0.0) {
      d.atoms[kept] = d.atoms[i];
      d.weights[kept] = d.weights[i];
      ++kept;
    }
  }
  d.atoms.resize(kept);
  d.weights.resize(kept);
  return d;
}

double mean(const DiscreteDistribution& d) {
  double m = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) m += d.weights[i] * d.atoms[i];
  return m;
}

double variance(const DiscreteDistribution& d) {
  const double mu = mean(d);
  double v = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double y = d.atoms[i] - mu;
    v += d.weights[i] * y * y;
  }
  return v;
}

double central_moment(const DiscreteDistribution& d, int k) {
  if (k < 1) throw std::invalid_argument("central_moment: k must be >= 1");
  const double mu = mean(d);
  double m = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    m += d.weights[i] * std::pow(d.atoms[i] - mu, k);
  return m;
}

CgfDerivatives cgf_at(const DiscreteDistribution& d, double lambda) {
  if (!std::isfinite(lambda))
    throw std::invalid_argument("cgf_at: lambda must be finite");
  const double mu = mean(d);
  // The largest exponent over the support sits at one of the two ends.
  const double shift =
      std::max(lambda * (d.x_min() - mu), lambda * (d.x_max() - mu));
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double y = d.atoms[i] - mu;
    const double e = d.weights[i] * std::exp(lambda * y - shift);
    s0 += e;
    s1 += e * y;
  }
  const double m1 = s1 / s0;
  // Second pass around the tilted mean keeps m2 nonnegative by construction.
  double s2 = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double y = d.atoms[i] - mu - m1;
    s2 += d.weights[i] * std::exp(lambda * (d.atoms[i] - mu) - shift) * y * y;
  }
  return {shift + std::log(s0), m1, s2 / s0};
}

double g_eval(const DiscreteDistribution& d, double lambda, double sigma2) {
  if (!(sigma2 >= 0.0))
    throw std::invalid_argument("g_eval: sigma2 must be nonnegative");
  return 0.5 * lambda * lambda * sigma2 - cgf_at(d, lambda).m0;
}

double h_eval(const DiscreteDistribution& d, double lambda) {
  const CgfDerivatives c = cgf_at(d, lambda);
  return lambda * c.m1 - 2.0 * c.m0;
}

DiscreteDistribution affine_transform(const DiscreteDistribution& d, double a,
                                      double b) {
  if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("affine_transform: a must be finite and nonzero");
  std::vector<double> atoms(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) atoms[i] = a * d.atoms[i] + b;
  // Re-validating through the constructor restores ordering for a < 0 and
  // merges atoms that a tiny |a| may have collapsed together.
  return new_discrete(std::move(atoms), d.weights);
}

}  // namespace subgauss
