#pragma once

// Independent stationary-scattering reference used only by tests: Numerov
// integration of u'' = 2m(V - E)u from the transmitted side, matched to plane
// waves on the incident side. Assumes V is flat at both grid ends.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

inline double numerov_transmission(const std::function<double(double)>& v, double mass,
                                   double e, double r_lo, double r_hi, int n) {
  using cplx = std::complex<double>;
  const double h = (r_hi - r_lo) / n;
  const double k_l = std::sqrt(2.0 * mass * (e - v(r_lo)));
  const double k_r = std::sqrt(2.0 * mass * (e - v(r_hi)));
  auto g = [&](int i) { return 2.0 * mass * (e - v(r_lo + h * i)); };

  // outgoing transmitted wave on the right, integrated backwards
  std::vector<cplx> u(n + 1);
  u[n] = std::exp(cplx(0.0, k_r * (r_lo + h * n)));
  u[n - 1] = std::exp(cplx(0.0, k_r * (r_lo + h * (n - 1))));
  const double c = h * h / 12.0;
  for (int i = n - 1; i >= 1; --i) {
    u[i - 1] = (2.0 * u[i] * (1.0 - 5.0 * c * g(i)) - u[i + 1] * (1.0 + c * g(i + 1))) /
               (1.0 + c * g(i - 1));
  }

  // match A e^{i k x} + B e^{-i k x} on the two leftmost points
  const double x0 = r_lo, x1 = r_lo + h;
  const cplx e0p = std::exp(cplx(0.0, k_l * x0)), e0m = std::exp(cplx(0.0, -k_l * x0));
  const cplx e1p = std::exp(cplx(0.0, k_l * x1)), e1m = std::exp(cplx(0.0, -k_l * x1));
  const cplx det = e0p * e1m - e0m * e1p;
  const cplx a = (u[0] * e1m - u[1] * e0m) / det;
  return (k_r / k_l) / std::norm(a);
}
