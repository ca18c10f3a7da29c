#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace lcross {

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double h6 = (b - a) / 12.0;
  const double left = h6 * (fa + 4.0 * flm + fm);
  const double right = h6 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with Richardson correction.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Action integral (1/hbar) * Int_{r1}^{r2} sqrt(2 m (E - V(r))) dr between the
// classical turning points r1 < r2, where V(r1) = V(r2) = E. The integrand has
// square-root endpoint singularities in its derivative; substituting
// r(theta) = mid + half*cos(theta) turns dr into half*sin(theta) dtheta which
// vanishes at both ends, so plain adaptive Simpson converges fast. E - V is
// clamped at 0 against roundoff just outside the well.
inline double action_integral(const std::function<double(double)>& potential, double mass,
                              double energy, double r1, double r2, double tol = 1e-12) {
  if (!(r2 > r1)) throw std::invalid_argument("action_integral: need r1 < r2");
  const double mid = 0.5 * (r1 + r2);
  const double half = 0.5 * (r2 - r1);
  auto g = [&](double theta) {
    const double r = mid + half * std::cos(theta);
    const double gap = energy - potential(r);
    const double v2 = gap > 0.0 ? 2.0 * mass * gap : 0.0;
    return std::sqrt(v2) * half * std::sin(theta);
  };
  return integrate(g, 0.0, M_PI, tol);
}

}  // namespace lcross
