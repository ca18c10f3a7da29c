#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "lcross/grid.hpp"

namespace lcross {

using cplx = std::complex<double>;

// Multi-surface grid wavefunction. Inner products use the plain Riemann sum
// with weight dr, consistently everywhere.
struct WaveFunction {
  Grid grid;
  std::vector<std::vector<cplx>> psi;  // [surface][grid point]

  WaveFunction() = default;
  WaveFunction(const Grid& g, std::size_t n_surfaces)
      : grid(g), psi(n_surfaces, std::vector<cplx>(g.n, cplx(0.0, 0.0))) {}

  std::size_t n_surfaces() const { return psi.size(); }

  // (2 pi sigma^2)^(-1/4) exp(-(x-c)^2/(4 sigma^2) + i p0 (x-c)), placed on
  // one surface.
  static WaveFunction gaussian(const Grid& g, std::size_t n_surfaces, std::size_t surface,
                               double center, double sigma, double p0) {
    WaveFunction w(g, n_surfaces);
    const double norm = std::pow(2.0 * M_PI * sigma * sigma, -0.25);
    for (std::size_t i = 0; i < g.n; ++i) {
      const double x = g.r(i) - center;
      w.psi[surface][i] =
          norm * std::exp(cplx(-x * x / (4.0 * sigma * sigma), p0 * x));
    }
    return w;
  }

  double pop(std::size_t s) const {
    double acc = 0.0;
    for (const cplx& a : psi[s]) acc += std::norm(a);
    return acc * grid.dr;
  }

  double norm2() const {
    double acc = 0.0;
    for (std::size_t s = 0; s < psi.size(); ++s) acc += pop(s);
    return acc;
  }
  double norm() const { return std::sqrt(norm2()); }

  void scale(double f) {
    for (auto& surf : psi)
      for (cplx& a : surf) a *= f;
  }
  void normalize() {
    const double nn = norm();
    if (nn == 0.0) throw std::runtime_error("WaveFunction: cannot normalize zero state");
    scale(1.0 / nn);
  }

  // Riemann moments over one surface (not normalized by the population).
  double moment_r(std::size_t s, int power = 1) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i)
      acc += std::pow(grid.r(i), power) * std::norm(psi[s][i]);
    return acc * grid.dr;
  }
};

inline cplx overlap(const WaveFunction& a, const WaveFunction& b) {
  if (!a.grid.same_axis(b.grid) || a.n_surfaces() != b.n_surfaces())
    throw std::invalid_argument("overlap: mismatched wavefunctions");
  cplx acc(0.0, 0.0);
  for (std::size_t s = 0; s < a.n_surfaces(); ++s)
    for (std::size_t i = 0; i < a.grid.n; ++i)
      acc += std::conj(a.psi[s][i]) * b.psi[s][i];
  return acc * a.grid.dr;
}

// |<a|b>| / (|a| |b|): scale-free fidelity between two states.
inline double normalized_overlap(const WaveFunction& a, const WaveFunction& b) {
  return std::abs(overlap(a, b)) / (a.norm() * b.norm());
}

}  // namespace lcross
