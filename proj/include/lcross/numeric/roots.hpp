#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace lcross {

// Bisection on a sign-changing bracket. Tolerance is on the abscissa.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-10, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect: endpoints do not bracket a root");
  for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Scan [lo, hi] on a uniform mesh and refine every sign change by bisection.
inline std::vector<double> find_roots_scan(const std::function<double(double)>& f, double lo,
                                           double hi, int samples = 2000,
                                           double xtol = 1e-10) {
  std::vector<double> roots;
  if (samples < 2) samples = 2;
  const double h = (hi - lo) / samples;
  double x_prev = lo, f_prev = f(lo);
  for (int i = 1; i <= samples; ++i) {
    const double x = (i == samples) ? hi : lo + h * i;
    const double fx = f(x);
    if (f_prev == 0.0) {
      if (roots.empty() || x_prev - roots.back() > xtol) roots.push_back(x_prev);
    } else if ((f_prev > 0.0) != (fx > 0.0) && fx != 0.0) {
      roots.push_back(bisect(f, x_prev, x, xtol));
    }
    x_prev = x;
    f_prev = fx;
  }
  if (f_prev == 0.0 && (roots.empty() || hi - roots.back() > xtol)) roots.push_back(hi);
  return roots;
}

}  // namespace lcross
