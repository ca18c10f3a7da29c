#pragma once

#include <cmath>
#include <vector>

#include "lcross/curve_set.hpp"
#include "lcross/numeric/eigen_sym.hpp"
#include "lcross/numeric/roots.hpp"

namespace lcross {

// Rotating-frame (field-dressed) picture for a CW or slowly enveloped field of
// carrier omega and amplitude e0: each diabat is shifted down by its photon
// count times omega, and every radiative pair picks up the half-Rabi coupling
// e0 mu_ij / 2 alongside any static coupling. Diagonal (permanent) dipoles
// average out in this picture and are ignored here; they only act in the
// explicitly time-dependent propagator.
struct DressedSet {
  const CurveSet* cs;
  double omega = 0.0;
  double e0 = 0.0;

  int n() const { return cs->n(); }

  double diag(int i, double r) const {
    return cs->v(i, r) - cs->photon_count(i) * omega;
  }
  double ddiag(int i, double r) const { return cs->dv(i, r); }
  double d2diag(int i, double r) const { return cs->d2v(i, r); }

  double offdiag(int i, int j, double r) const {
    double w = cs->coupling(i, j, r);
    if (i != j && cs->has_dipole(i, j)) w += 0.5 * e0 * cs->dipole(i, j, r);
    return w;
  }
  double doffdiag(int i, int j, double r) const {
    double w = 0.0;
    const auto key = CurveSet::ordered(i, j);
    if (const auto it = cs->couplings.find(key); it != cs->couplings.end())
      w += it->second.deriv(r);
    if (i != j)
      if (const auto it = cs->dipoles.find(key); it != cs->dipoles.end())
        w += 0.5 * e0 * it->second.deriv(r);
    return w;
  }
  double d2offdiag(int i, int j, double r) const {
    double w = 0.0;
    const auto key = CurveSet::ordered(i, j);
    if (const auto it = cs->couplings.find(key); it != cs->couplings.end())
      w += it->second.second_deriv(r);
    if (i != j)
      if (const auto it = cs->dipoles.find(key); it != cs->dipoles.end())
        w += 0.5 * e0 * it->second.second_deriv(r);
    return w;
  }

  // Row-major n x n dressed potential matrix at r.
  void matrix(double r, double* w) const {
    const int m = n();
    for (int i = 0; i < m; ++i) {
      w[i * m + i] = diag(i, r);
      for (int j = i + 1; j < m; ++j) w[i * m + j] = w[j * m + i] = offdiag(i, j, r);
    }
  }

  SymEig adiabats(double r) const {
    const int m = n();
    std::vector<double> w(m * m);
    matrix(r, w.data());
    return eig_sym_jacobi(std::move(w), m);
  }
};

// Adiabatic pair of a two-state block, with analytic derivatives. Written for
// the crossing analysis, where the upper-well shape (value, slope, curvature)
// is integrated and differentiated.
struct TwoSurfaceAdiabats {
  const DressedSet* ds;
  int i = 0, j = 1;

  struct Parts {
    double mean, dmean, d2mean;  // (W_ii + W_jj)/2 and derivatives
    double gap, dgap, d2gap;     // (W_ii - W_jj)/2 and derivatives
    double c, dc, d2c;           // W_ij and derivatives
    double rho;                  // sqrt(gap^2 + c^2)
  };

  Parts parts(double r) const {
    Parts p;
    const double wi = ds->diag(i, r), wj = ds->diag(j, r);
    const double dwi = ds->ddiag(i, r), dwj = ds->ddiag(j, r);
    const double d2wi = ds->d2diag(i, r), d2wj = ds->d2diag(j, r);
    p.mean = 0.5 * (wi + wj);
    p.dmean = 0.5 * (dwi + dwj);
    p.d2mean = 0.5 * (d2wi + d2wj);
    p.gap = 0.5 * (wi - wj);
    p.dgap = 0.5 * (dwi - dwj);
    p.d2gap = 0.5 * (d2wi - d2wj);
    p.c = ds->offdiag(i, j, r);
    p.dc = ds->doffdiag(i, j, r);
    p.d2c = ds->d2offdiag(i, j, r);
    p.rho = std::sqrt(p.gap * p.gap + p.c * p.c);
    return p;
  }

  double upper(double r) const {
    const Parts p = parts(r);
    return p.mean + p.rho;
  }
  double lower(double r) const {
    const Parts p = parts(r);
    return p.mean - p.rho;
  }
  double upper_deriv(double r) const {
    const Parts p = parts(r);
    return p.dmean + (p.gap * p.dgap + p.c * p.dc) / p.rho;
  }
  double lower_deriv(double r) const {
    const Parts p = parts(r);
    return p.dmean - (p.gap * p.dgap + p.c * p.dc) / p.rho;
  }
  double upper_second_deriv(double r) const {
    const Parts p = parts(r);
    const double s = p.gap * p.dgap + p.c * p.dc;
    const double q = p.dgap * p.dgap + p.gap * p.d2gap + p.dc * p.dc + p.c * p.d2c;
    return p.d2mean + q / p.rho - s * s / (p.rho * p.rho * p.rho);
  }
  double lower_second_deriv(double r) const {
    const Parts p = parts(r);
    const double s = p.gap * p.dgap + p.c * p.dc;
    const double q = p.dgap * p.dgap + p.gap * p.d2gap + p.dc * p.dc + p.c * p.d2c;
    return p.d2mean - q / p.rho + s * s / (p.rho * p.rho * p.rho);
  }
};

// A diabatic curve crossing of the dressed potentials, with the local
// quantities every transition model needs.
struct CrossingPoint {
  int i, j;        // surfaces, i < j
  double r_x;      // crossing position
  double e_x;      // dressed energy at the crossing
  double f_i, f_j; // diabat slopes dW/dr at r_x
  double v12;      // |off-diagonal element| at r_x
};

inline std::vector<CrossingPoint> find_crossings(const DressedSet& ds, double r_lo,
                                                 double r_hi, int samples = 4000) {
  std::vector<CrossingPoint> out;
  const int m = ds.n();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      auto gap = [&](double r) { return ds.diag(i, r) - ds.diag(j, r); };
      for (double r_x : find_roots_scan(gap, r_lo, r_hi, samples, 1e-11)) {
        CrossingPoint cp;
        cp.i = i;
        cp.j = j;
        cp.r_x = r_x;
        cp.e_x = ds.diag(i, r_x);
        cp.f_i = ds.ddiag(i, r_x);
        cp.f_j = ds.ddiag(j, r_x);
        cp.v12 = std::fabs(ds.offdiag(i, j, r_x));
        out.push_back(cp);
      }
    }
  }
  return out;
}

}  // namespace lcross
