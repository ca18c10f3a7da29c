#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lcross/grid.hpp"
#include "lcross/numeric/eigen_sym.hpp"
#include "lcross/wavefunction.hpp"

namespace lcross {

// Vibrational eigenstates on a periodic Fourier grid: the kinetic block is the
// circulant whose symbol is k^2/(2m), the potential is diagonal, and the dense
// symmetric matrix is diagonalized directly. States are Riemann-normalized
// (sum |psi|^2 dr = 1) with the leftmost antinode taken positive.
struct FghResult {
  Grid grid;
  std::vector<double> energies;              // bound levels, ascending
  std::vector<std::vector<double>> states;   // matching real eigenfunctions
  double v_edge = 0.0;                       // potential at the last grid point
};

inline FghResult fgh_solve(const std::function<double(double)>& v, double mass,
                           const Grid& g, int n_wanted) {
  const std::size_t n = g.n;
  // Circulant kinetic coefficients t_d = (1/n) sum_j (k_j^2/2m) cos(2 pi j d / n).
  const auto ks = g.k_values();
  std::vector<double> t(n, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += ks[j] * ks[j] * std::cos(2.0 * M_PI * double(j) * double(d) / double(n));
    t[d] = acc / (2.0 * mass * double(n));
  }
  std::vector<double> h(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t d = i >= j ? i - j : j - i;
      h[i * n + j] = t[d];
    }
  for (std::size_t i = 0; i < n; ++i) h[i * n + i] += v(g.r(i));

  const SymEig eig = eig_sym(std::move(h), n);

  FghResult out;
  out.grid = g;
  out.v_edge = v(g.r_last());
  int n_bound = 0;
  while (n_bound < static_cast<int>(n) && eig.values[n_bound] < out.v_edge) ++n_bound;
  if (n_wanted > n_bound) {
    std::ostringstream os;
    os << "fgh_solve: requested " << n_wanted << " bound states but only " << n_bound
       << " lie below the potential at the grid edge (" << out.v_edge << ")";
    throw std::runtime_error(os.str());
  }
  const double inv_sqrt_dr = 1.0 / std::sqrt(g.dr);
  for (int k = 0; k < n_wanted; ++k) {
    out.energies.push_back(eig.values[k]);
    std::vector<double> psi(eig.vec(k), eig.vec(k) + n);
    // sign: first sizable lobe from the left is positive
    double peak = 0.0;
    for (double a : psi) peak = std::max(peak, std::fabs(a));
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(psi[i]) >= 0.35 * peak) {
        if (psi[i] < 0.0)
          for (auto& a : psi) a = -a;
        break;
      }
    }
    for (auto& a : psi) a *= inv_sqrt_dr;
    out.states.push_back(std::move(psi));
  }
  return out;
}

// Place a subgrid eigenstate on a larger propagation grid sharing the same
// origin and spacing; the tail past the subgrid is written as zero.
inline WaveFunction embed_state(const FghResult& fgh, int idx, const Grid& full,
                                std::size_t n_surfaces, std::size_t surface) {
  if (fgh.grid.r0 != full.r0 || fgh.grid.dr != full.dr || fgh.grid.n > full.n)
    throw std::invalid_argument("embed_state: grids are not nested");
  WaveFunction w(full, n_surfaces);
  const auto& src = fgh.states.at(idx);
  for (std::size_t i = 0; i < fgh.grid.n; ++i) w.psi[surface][i] = src[i];
  return w;
}

}  // namespace lcross
