#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "lcross/io.hpp"
#include "lcross/wavefunction.hpp"

namespace lcross {

// Energy-resolved transmission from a single wavepacket run.
//
// The packet (2 pi sigma^2)^(-1/4) exp(-(r-c)^2/(4 sigma^2) + i k0 (r-c))
// carries the momentum density |phi(k)|^2 = sqrt(2/pi) sigma
// exp(-2 sigma^2 (k-k0)^2), so its probability density per unit energy on the
// incident channel is rho(E) = m |phi(k_in)|^2 / k_in with
// k_in = sqrt(2 m (E - v_in)).
//
// Accumulating the windowed time Fourier transform of psi on a five-point
// stencil around the probe gives the stationary scattering amplitude there;
// its current divided by 2 pi rho(E) is the transmission probability. (For a
// free packet this ratio is exactly 1, which is the normalization check.)
struct ScatteringSpec {
  double v_in = 0.0;         // incident-channel asymptotic potential
  double packet_sigma = 0.5;
  double packet_k0 = 0.0;    // signed
  std::size_t surf_out = 0;  // surface carrying the transmitted flux
  double r_probe = 0.0;
  std::vector<double> energies;
};

class TransmissionAccumulator {
 public:
  TransmissionAccumulator(const Grid& g, double mass, const ScatteringSpec& spec)
      : mass_(mass), spec_(spec) {
    double best = 1e300;
    for (std::size_t i = 2; i + 2 < g.n; ++i) {
      const double d = std::fabs(g.r(i) - spec.r_probe);
      if (d < best) {
        best = d;
        index_ = i;
      }
    }
    dr_ = g.dr;
    acc_.assign(spec.energies.size() * 5, cplx(0.0, 0.0));
    phase_.assign(spec.energies.size(), cplx(1.0, 0.0));
    rot_.resize(spec.energies.size());
  }

  // Call after each step with the time the state has reached. Interior
  // rectangle rule; the packet vanishes at both window ends, so end
  // corrections are immaterial.
  void step(const WaveFunction& psi, double t, double dt) {
    if (!started_) {
      for (std::size_t e = 0; e < spec_.energies.size(); ++e) {
        phase_[e] = std::exp(cplx(0.0, spec_.energies[e] * t));
        rot_[e] = std::exp(cplx(0.0, spec_.energies[e] * dt));
      }
      started_ = true;
    }
    const auto& p = psi.psi[spec_.surf_out];
    for (std::size_t e = 0; e < spec_.energies.size(); ++e) {
      const cplx w = phase_[e] * dt;
      cplx* a = acc_.data() + e * 5;
      a[0] += w * p[index_ - 2];
      a[1] += w * p[index_ - 1];
      a[2] += w * p[index_];
      a[3] += w * p[index_ + 1];
      a[4] += w * p[index_ + 2];
      phase_[e] *= rot_[e];
    }
  }

  // Transmission per requested energy. Energies at or below the incident
  // asymptote (no incoming momentum) report 0.
  std::vector<double> finalize() const {
    std::vector<double> out(spec_.energies.size(), 0.0);
    for (std::size_t e = 0; e < spec_.energies.size(); ++e) {
      const double gap = spec_.energies[e] - spec_.v_in;
      if (gap <= 0.0) continue;
      const double k = std::sqrt(2.0 * mass_ * gap);
      const double kk = spec_.packet_k0 >= 0.0 ? k : -k;
      const double dk = kk - spec_.packet_k0;
      const double phi2 = std::sqrt(2.0 / M_PI) * spec_.packet_sigma *
                          std::exp(-2.0 * spec_.packet_sigma * spec_.packet_sigma * dk * dk);
      const double rho = mass_ * phi2 / k;
      const cplx* a = acc_.data() + e * 5;
      const cplx d = (-a[4] + 8.0 * a[3] - 8.0 * a[1] + a[0]) / (12.0 * dr_);
      const double j = (std::conj(a[2]) * d).imag() / mass_;
      out[e] = std::fabs(j) / (2.0 * M_PI * rho);
    }
    return out;
  }

  const ScatteringSpec& spec() const { return spec_; }

 private:
  double mass_, dr_;
  std::size_t index_ = 2;
  ScatteringSpec spec_;
  std::vector<cplx> acc_, phase_, rot_;
  bool started_ = false;
};

}  // namespace lcross
