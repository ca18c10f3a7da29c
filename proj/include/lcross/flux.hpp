#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lcross/wavefunction.hpp"

namespace lcross {

// Probability current j = Im[psi* d(psi)/dR] / m with the fourth-order
// centered first-derivative stencil.
inline double probability_current(const WaveFunction& psi, std::size_t surface,
                                  std::size_t i, double mass) {
  if (i < 2 || i + 2 >= psi.grid.n)
    throw std::invalid_argument("probability_current: stencil leaves the grid");
  const auto& p = psi.psi[surface];
  const cplx d =
      (-p[i + 2] + 8.0 * p[i + 1] - 8.0 * p[i - 1] + p[i - 2]) / (12.0 * psi.grid.dr);
  return (std::conj(p[i]) * d).imag() / mass;
}

// Time-integrated flux through a fixed point, one accumulator per surface,
// trapezoid rule in time.
class FluxProbe {
 public:
  FluxProbe(const Grid& g, double r_probe, double mass, std::size_t n_surfaces)
      : mass_(mass), j_prev_(n_surfaces, 0.0), total_(n_surfaces, 0.0) {
    double best = 1e300;
    for (std::size_t i = 2; i + 2 < g.n; ++i) {
      const double d = std::fabs(g.r(i) - r_probe);
      if (d < best) {
        best = d;
        index_ = i;
      }
    }
  }

  std::size_t index() const { return index_; }

  // Call once per step after the state has advanced; the first call only
  // primes the trapezoid.
  void step(const WaveFunction& psi, double dt) {
    for (std::size_t s = 0; s < j_prev_.size(); ++s) {
      const double j = probability_current(psi, s, index_, mass_);
      if (primed_) total_[s] += 0.5 * dt * (j_prev_[s] + j);
      j_prev_[s] = j;
    }
    primed_ = true;
  }

  double total(std::size_t surface) const { return total_[surface]; }
  double current(std::size_t surface) const { return j_prev_[surface]; }

 private:
  double mass_;
  std::size_t index_ = 2;
  bool primed_ = false;
  std::vector<double> j_prev_, total_;
};

}  // namespace lcross
