#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lcross/dressed.hpp"
#include "lcross/numeric/quadrature.hpp"
#include "lcross/numeric/roots.hpp"

namespace lcross {

// Local linearization of a diabatic crossing: coupling v12, signed diabat
// slopes f1, f2 at the crossing point, reduced mass, and the crossing energy.
// For opposite-sign slopes (a crossing that supports an upper well) the slope
// combinations below reduce to the usual magnitude forms automatically.
struct ZnInput {
  double v12;
  double f1, f2;
  double mass;
  double e_x;

  double df() const { return std::fabs(f1 - f2); }
  double fgm() const { return std::sqrt(std::fabs(f1 * f2)); }
};

inline void check_zn(const ZnInput& in) {
  if (!(in.v12 > 0.0)) throw std::invalid_argument("crossing: coupling must be positive");
  if (!(in.mass > 0.0)) throw std::invalid_argument("crossing: mass must be positive");
  if (in.f1 == 0.0 || in.f2 == 0.0)
    throw std::invalid_argument("crossing: slopes must be nonzero");
}

// Dimensionless coupling-strength parameter squared.
inline double zn_a2(const ZnInput& in) {
  check_zn(in);
  return in.df() * in.fgm() / (16.0 * in.mass * in.v12 * in.v12 * in.v12);
}

// Dimensionless energy parameter squared (negative below the crossing).
inline double zn_b2(const ZnInput& in, double e) {
  check_zn(in);
  return (e - in.e_x) * in.df() / (2.0 * in.fgm() * in.v12);
}

// Single-passage diabatic survival in the linear model:
// p = exp(-2 pi v12^2 / (v |f1 - f2|)), v = sqrt(2 (e - e_x)/m).
// Defined for e > e_x; the limit from above is 0 survival... the adiabatic
// limit p -> 0 is returned for e <= e_x.
inline double lz_probability(const ZnInput& in, double e) {
  check_zn(in);
  if (e <= in.e_x) return 0.0;
  const double v = std::sqrt(2.0 * (e - in.e_x) / in.mass);
  return std::exp(-2.0 * M_PI * in.v12 * in.v12 / (v * in.df()));
}

// Corrected single-passage probability expressed through the reduced
// parameters; falls back to the plain exponential's value as the correction
// terms vanish (b^2 large). The bracketed combination can go negative very
// close to the crossing for weak coupling; it is clamped at zero there.
inline double zn_probability(const ZnInput& in, double e) {
  const double a2 = zn_a2(in);
  const double b2 = zn_b2(in, e);
  if (b2 <= 0.0) return 0.0;
  const double a = std::sqrt(a2);
  double inner = b2 * b2 - 0.72 + 0.62 * std::pow(a, 1.43);
  if (inner < 0.0) inner = 0.0;
  const double denom = b2 + std::sqrt(inner);
  if (denom <= 0.0) return 0.0;
  return std::exp(-(M_PI / (4.0 * a)) * std::sqrt(2.0 / denom));
}

// Transmission through an opposite-slope crossing at energy e above the
// crossing, given the single-passage probability p and the phase psi
// accumulated across the upper-adiabat well. Vanishes identically at
// psi = (n + 1/2) pi: complete reflection.
inline double nt_transmission(double p, double psi) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double c2 = std::cos(psi) * std::cos(psi);
  return 4.0 * c2 / (4.0 * c2 + p * p / (1.0 - p));
}

// --- upper-adiabat well analysis ---------------------------------------------

struct UpperWell {
  double r_min;  // position of the well bottom
  double e_min;  // upper adiabat value there
};

inline UpperWell locate_upper_well(const TwoSurfaceAdiabats& ad, double r_lo, double r_hi) {
  auto slope = [&](double r) { return ad.upper_deriv(r); };
  if (!(slope(r_lo) < 0.0 && slope(r_hi) > 0.0))
    throw std::invalid_argument("locate_upper_well: window does not bracket a minimum");
  const double r_min = bisect(slope, r_lo, r_hi, 1e-12);
  return {r_min, ad.upper(r_min)};
}

// Phase integral across the upper well at energy e: the classical action
// between the turning points, in units of hbar. Turning points are bisected
// to 1e-10.
inline double upper_well_phase(const TwoSurfaceAdiabats& ad, double mass, double e,
                               double r_lo, double r_hi) {
  const UpperWell well = locate_upper_well(ad, r_lo, r_hi);
  if (e <= well.e_min)
    throw std::invalid_argument("upper_well_phase: energy below the well bottom");
  auto f = [&](double r) { return ad.upper(r) - e; };
  if (!(f(r_lo) > 0.0 && f(r_hi) > 0.0))
    throw std::invalid_argument("upper_well_phase: energy not confined in the window");
  const double t1 = bisect(f, r_lo, well.r_min, 1e-10);
  const double t2 = bisect(f, well.r_min, r_hi, 1e-10);
  return action_integral([&](double r) { return ad.upper(r); }, mass, e, t1, t2, 1e-13);
}

// Energies where the well phase hits (n + 1/2) pi, i.e. where transmission
// through the crossing shuts off. The phase grows monotonically with energy,
// so each branch is bisected independently.
inline std::vector<double> complete_reflection_energies(const TwoSurfaceAdiabats& ad,
                                                        double mass, double e_lo,
                                                        double e_hi, double r_lo,
                                                        double r_hi) {
  const UpperWell well = locate_upper_well(ad, r_lo, r_hi);
  double start = std::max(e_lo, well.e_min + 1e-9 * std::max(1.0, std::fabs(well.e_min)));
  if (!(e_hi > start)) return {};
  auto phase = [&](double e) { return upper_well_phase(ad, mass, e, r_lo, r_hi); };
  const double psi_lo = phase(start), psi_hi = phase(e_hi);
  std::vector<double> out;
  int n = static_cast<int>(std::ceil(psi_lo / M_PI - 0.5));
  if (n < 0) n = 0;
  for (; (n + 0.5) * M_PI <= psi_hi; ++n) {
    const double target = (n + 0.5) * M_PI;
    if (target < psi_lo) continue;
    out.push_back(bisect([&](double e) { return phase(e) - target; }, start, e_hi, 1e-12));
  }
  return out;
}

}  // namespace lcross
