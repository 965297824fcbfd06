#include "subgauss/rootfind.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace subgauss {

RootResult brent_root(const std::function<double(double)>& f, double a,
                      double b, double fa, double fb, double rel_tol,
                      int max_iter) {
  if (!(a < b)) throw std::invalid_argument("brent_root: require a < b");
  if (fa == 0.0) return {a, 0.0, 0, true};
  if (fb == 0.0) return {b, 0.0, 0, true};
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument("brent_root: endpoints must bracket a root");

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa;
  double d = b - a, e = d;

  int it = 0;
  for (; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * rel_tol * std::fabs(b);
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return {b, fb, it, true};

    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      // Inverse quadratic interpolation, falling back to secant.
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
      const double min2 = std::fabs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;  // interpolation unacceptable: bisect
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return {b, fb, it, false};
}

MinResult golden_min(const std::function<double(double)>& f, double a, double b,
                     int iterations) {
  if (!(a <= b)) throw std::invalid_argument("golden_min: require a <= b");
  constexpr double inv_gr = 0.6180339887498948482;  // 1/phi
  double c = b - inv_gr * (b - a);
  double d = a + inv_gr * (b - a);
  double fc = f(c), fd = f(d);
  double best_x = (fc < fd) ? c : d;
  double best_f = std::min(fc, fd);
  int it = 0;
  for (; it < iterations; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_gr * (b - a);
      fd = f(d);
    }
    if (fc < best_f) {
      best_f = fc;
      best_x = c;
    }
    if (fd < best_f) {
      best_f = fd;
      best_x = d;
    }
  }
  return {best_x, best_f, it};
}

}  // namespace subgauss
