#pragma once
// Finite discrete distributions and numerically stable evaluation of the
// centered cumulant-generating function M(l) = ln E[exp(l (X - mu))].

#include <cstddef>
#include <vector>

namespace subgauss {

// Atom positions with matching positive weights.  Always kept normalized:
// atoms strictly increasing, weights > 0 and summing to 1.  Construct through
// new_discrete(), which sorts, merges duplicate atoms and renormalizes.
struct DiscreteDistribution {
  std::vector<double> atoms;
  std::vector<double> weights;

  std::size_t size() const { return atoms.size(); }
  double x_min() const { return atoms.front(); }
  double x_max() const { return atoms.back(); }
};

// Value and first two derivatives of the centered CGF at a single point.
// m2 is a variance under the exponentially tilted measure, hence >= 0.
struct CgfDerivatives {
  double m0;  // M(l)
  double m1;  // M'(l)
  double m2;  // M''(l) >= 0
};

DiscreteDistribution new_discrete(std::vector<double> atoms,
                                  std::vector<double> weights);

double mean(const DiscreteDistribution& d);
double variance(const DiscreteDistribution& d);

// k-th moment about the mean, E[(X - mu)^k]; k = 1 gives 0, k = 2 the variance.
double central_moment(const DiscreteDistribution& d, int k);

// Evaluate M, M', M'' at lambda.  The largest exponent is subtracted before
// exponentiation and added back after the log, so no finite lambda overflows
// on bounded support; derivatives are moments under the tilted weights
// q_i proportional to w_i exp(lambda (x_i - mu)).
CgfDerivatives cgf_at(const DiscreteDistribution& d, double lambda);

// g(l; s2) = l^2 s2 / 2 - M(l).  s2 is a variance proxy iff g >= 0 on all of R.
double g_eval(const DiscreteDistribution& d, double lambda, double sigma2);

// h(l) = l M'(l) - 2 M(l).  At a nonzero root l_c of h, the function
// g(.; M'(l_c)/l_c) has value 0 and slope 0 at l_c, i.e. a tangential contact
// with the axis; these are the candidate critical points of the proxy search.
double h_eval(const DiscreteDistribution& d, double lambda);

// x -> a x + b applied to every atom; weights unchanged, order restored when
// a < 0.  The optimal proxy scales as a^2 under this map and b drops out.
DiscreteDistribution affine_transform(const DiscreteDistribution& d, double a, double b);

}  // namespace subgauss
