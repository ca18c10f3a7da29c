#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "lcross/cost.hpp"
#include "lcross/curves.hpp"
#include "lcross/grid.hpp"
#include "lcross/numeric/parallel.hpp"
#include "lcross/numeric/vecmath.hpp"

namespace lcross {

// Frozen-Gaussian (coherent state) closed forms. The basis function is
//   g_{q,p}(x) = (gamma/pi)^{1/4} exp(-gamma (x-q)^2 / 2 + i p (x-q)),
// unit-normalized, with the momentum phase anchored at the center q.

using cplx = std::complex<double>;

inline double frozen_width(double gamma) { return 1.0 / std::sqrt(2.0 * gamma); }

inline cplx frozen_gaussian(double gamma, double q, double p, double x) {
  const double d = x - q;
  return std::pow(gamma / M_PI, 0.25) * std::exp(cplx(-0.5 * gamma * d * d, p * d));
}

// <g_{q1,p1}|g_{q2,p2}> for a shared width parameter. One complex exp.
inline cplx pair_overlap(double gamma, double q1, double p1, double q2, double p2) {
  const double dq = q1 - q2, dp = p1 - p2;
  return std::exp(cplx(-0.25 * gamma * dq * dq - 0.25 * dp * dp / gamma,
                       -0.5 * (p1 + p2) * (q2 - q1)));
}

// <g1|x|g2> = z_c <g1|g2>; swapping bra and ket conjugates z_c.
inline cplx pair_center(double gamma, double q1, double p1, double q2, double p2) {
  return cplx(0.5 * (q1 + q2), 0.5 * (p2 - p1) / gamma);
}

// <g_{q,p}|psi0> against the Gaussian packet
//   psi0(x) = (2 pi sigma^2)^{-1/4} exp(-(x-c)^2/(4 sigma^2) + i pbar (x-c)).
inline cplx packet_overlap(double gamma, double q, double p, double center, double sigma,
                           double pbar) {
  const double a1 = 0.5 * gamma;
  const double a2 = 0.25 / (sigma * sigma);
  const double a = a1 + a2;
  const cplx b(2.0 * a1 * q + 2.0 * a2 * center, pbar - p);
  const cplx c0(-a1 * q * q - a2 * center * center, p * q - pbar * center);
  const double pref = std::pow(gamma / M_PI, 0.25) *
                      std::pow(2.0 * M_PI * sigma * sigma, -0.25) * std::sqrt(M_PI / a);
  return pref * std::exp(b * b / (4.0 * a) + c0);
}

// Marginal variances of |<g_{q,p}|psi0>|^2, the sampling density for the
// initial-value representation. Both marginals are Gaussian.
inline double husimi_var_q(double gamma, double sigma) {
  const double a1 = 0.5 * gamma, a2 = 0.25 / (sigma * sigma);
  return (a1 + a2) / (4.0 * a1 * a2);
}
inline double husimi_var_p(double gamma, double sigma) {
  return 0.5 * gamma + 0.25 / (sigma * sigma);
}

// Snapshot of a frozen-Gaussian superposition: psi(x) = sum_j coeff_j g_{q_j,p_j}(x).
struct CoherentCloud {
  double gamma = 1.0;
  std::vector<double> q, p;
  std::vector<cplx> coeff;

  std::size_t size() const { return q.size(); }
};

// psi(x_i) on a grid. Each Gaussian only touches points within
// cutoff_sigmas of its center; outside, the tail is dropped as exact zero.
inline std::vector<cplx> cloud_on_grid(const CoherentCloud& cloud, const Grid& g,
                                       double cutoff_sigmas = 6.0) {
  std::vector<cplx> psi(g.n, cplx(0.0, 0.0));
  const double w = cutoff_sigmas * frozen_width(cloud.gamma);
  std::int64_t evals = 0;
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    const double qj = cloud.q[j], pj = cloud.p[j];
    const auto lo = static_cast<std::ptrdiff_t>(std::ceil((qj - w - g.r0) / g.dr));
    const auto hi = static_cast<std::ptrdiff_t>(std::floor((qj + w - g.r0) / g.dr));
    const std::size_t i0 = static_cast<std::size_t>(std::max<std::ptrdiff_t>(lo, 0));
    const std::size_t i1 = static_cast<std::size_t>(
        std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(g.n) - 1));
    for (std::size_t i = i0; i <= i1 && i < g.n; ++i)
      psi[i] += cloud.coeff[j] * frozen_gaussian(cloud.gamma, qj, pj, g.r(i));
    if (i1 >= i0) evals += static_cast<std::int64_t>(i1 - i0 + 1);
  }
  CostCounters::global().gaussian_evals += evals;
  return psi;
}

// <phi_grid|cloud> = sum_j coeff_j * (sum_i conj(phi_i) g_j(x_i) dr), with the
// same per-Gaussian window as cloud_on_grid.
inline cplx grid_cloud_overlap(const std::vector<cplx>& phi, const Grid& g,
                               const CoherentCloud& cloud, double cutoff_sigmas = 6.0) {
  if (phi.size() != g.n) throw std::invalid_argument("grid_cloud_overlap: size mismatch");
  const double w = cutoff_sigmas * frozen_width(cloud.gamma);
  cplx total = chunked_sum<cplx>(cloud.size(), [&](std::size_t j) {
    const double qj = cloud.q[j], pj = cloud.p[j];
    const auto lo = static_cast<std::ptrdiff_t>(std::ceil((qj - w - g.r0) / g.dr));
    const auto hi = static_cast<std::ptrdiff_t>(std::floor((qj + w - g.r0) / g.dr));
    const std::size_t i0 = static_cast<std::size_t>(std::max<std::ptrdiff_t>(lo, 0));
    const std::size_t i1 = static_cast<std::size_t>(
        std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(g.n) - 1));
    cplx acc(0.0, 0.0);
    for (std::size_t i = i0; i <= i1 && i < g.n; ++i)
      acc += std::conj(phi[i]) * frozen_gaussian(cloud.gamma, qj, pj, g.r(i));
    CostCounters::global().gaussian_evals += i1 >= i0 ? static_cast<std::int64_t>(i1 - i0 + 1) : 0;
    return cloud.coeff[j] * acc * g.dr;
  });
  return total;
}

// <bra|ket> between two clouds sharing gamma. O(N_bra N_ket) pair overlaps.
inline cplx cloud_overlap(const CoherentCloud& bra, const CoherentCloud& ket) {
  if (bra.gamma != ket.gamma)
    throw std::invalid_argument("cloud_overlap: width parameters differ");
  const std::size_t nb = bra.size(), nk = ket.size();
  cplx total = chunked_sum<cplx>(nb, [&](std::size_t j) {
    cplx acc(0.0, 0.0);
    for (std::size_t k = 0; k < nk; ++k)
      acc += std::conj(bra.coeff[j]) * ket.coeff[k] *
             pair_overlap(bra.gamma, bra.q[j], bra.p[j], ket.q[k], ket.p[k]);
    return acc;
  });
  CostCounters::global().pair_evals += static_cast<std::int64_t>(nb * nk);
  return total;
}

// <bra|ket> and <bra|mu|ket> in one pass, sharing the complex exp of each
// pair. mu is linearized around the midpoint of each Gaussian pair:
//   <g1|mu|g2> ~ [mu(xm) + mu'(xm) (z_c - xm)] <g1|g2>,  xm = (q1+q2)/2.
struct CloudBracket {
  cplx overlap;
  cplx dipole;
};

inline CloudBracket cloud_overlap_and_dipole(const CoherentCloud& bra,
                                             const CoherentCloud& ket, const CurveSum& mu) {
  if (bra.gamma != ket.gamma)
    throw std::invalid_argument("cloud_overlap_and_dipole: width parameters differ");
  const std::size_t nb = bra.size(), nk = ket.size();
  struct Two {
    cplx o{0.0, 0.0}, d{0.0, 0.0};
    Two& operator+=(const Two& r) {
      o += r.o;
      d += r.d;
      return *this;
    }
  };
  Two total = chunked_sum<Two>(nb, [&](std::size_t j) {
    Two acc;
    const double qj = bra.q[j], pj = bra.p[j];
    const cplx cj = std::conj(bra.coeff[j]);
    for (std::size_t k = 0; k < nk; ++k) {
      const cplx ov =
          cj * ket.coeff[k] * pair_overlap(bra.gamma, qj, pj, ket.q[k], ket.p[k]);
      const double xm = 0.5 * (qj + ket.q[k]);
      const cplx zc(xm, 0.5 * (ket.p[k] - pj) / bra.gamma);
      const PotPoint mp = mu.eval(xm);
      acc.o += ov;
      acc.d += ov * (mp.v + mp.dv * (zc - xm));
    }
    return acc;
  });
  CostCounters::global().pair_evals += static_cast<std::int64_t>(nb * nk);
  return {total.o, total.d};
}

// mu and mu' tabulated on uniform nodes, linearly interpolated with clamped
// ends. Control sweeps call the pair bracket once per field node, so the
// curve walk is paid once here instead of once per Gaussian pair; within the
// table range the interpolant matches the curve to its second difference and
// reproduces ramp dipoles exactly.
struct DipoleTable {
  double r0 = 0.0;
  double inv_dr = 1.0;
  std::vector<double> v, dv;

  static DipoleTable build(const CurveSum& mu, double lo, double hi,
                           std::size_t n = 8192) {
    if (!(hi > lo) || n < 2) throw std::invalid_argument("DipoleTable: bad range");
    DipoleTable t;
    t.r0 = lo;
    const double dr = (hi - lo) / static_cast<double>(n - 1);
    t.inv_dr = 1.0 / dr;
    t.v.resize(n);
    t.dv.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const PotPoint p = mu.eval(lo + dr * static_cast<double>(i));
      t.v[i] = p.v;
      t.dv[i] = p.dv;
    }
    return t;
  }
};

// Same bracket as above with the dipole read from the table. The pair
// exponent splits into per-side parts, folded into the coefficients after
// centering phase space on the joint cloud mean (keeping the folded
// magnitudes in range), plus bilinear cross terms; the cross exp/sin/cos run
// through the batched transcendentals block by block. Matches the curve
// version to roundoff.
inline CloudBracket cloud_overlap_and_dipole(const CoherentCloud& bra,
                                             const CoherentCloud& ket,
                                             const DipoleTable& mu) {
  if (bra.gamma != ket.gamma)
    throw std::invalid_argument("cloud_overlap_and_dipole: width parameters differ");
  const std::size_t nb = bra.size(), nk = ket.size();
  if (nb == 0 || nk == 0) return {cplx(0.0, 0.0), cplx(0.0, 0.0)};
  const double g = bra.gamma;

  double qbar = 0.0, pbar = 0.0;
  for (std::size_t j = 0; j < nb; ++j) {
    qbar += bra.q[j];
    pbar += bra.p[j];
  }
  for (std::size_t k = 0; k < nk; ++k) {
    qbar += ket.q[k];
    pbar += ket.p[k];
  }
  qbar /= static_cast<double>(nb + nk);
  pbar /= static_cast<double>(nb + nk);

  std::vector<double> kq(nk), kp(nk), fr_(nk), fi_(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    const double qs = ket.q[k] - qbar, ps = ket.p[k] - pbar;
    kq[k] = qs;
    kp[k] = ps;
    const double re = -0.25 * g * qs * qs - 0.25 * ps * ps / g;
    const double im = -0.5 * ps * qs - pbar * qs;
    const double e = std::exp(re);
    const cplx f = ket.coeff[k] * cplx(e * std::cos(im), e * std::sin(im));
    fr_[k] = f.real();
    fi_[k] = f.imag();
  }

  constexpr std::size_t kBlock = 512;
  const double half_g = 0.5 * g, inv2g = 0.5 / g;
  const double fi_hi = static_cast<double>(mu.v.size() - 1);
  const std::size_t seg_last = mu.v.size() - 2;

  struct Two {
    cplx o{0.0, 0.0}, d{0.0, 0.0};
    Two& operator+=(const Two& r) {
      o += r.o;
      d += r.d;
      return *this;
    }
  };
  Two total = chunked_sum<Two>(nb, [&](std::size_t j) {
    alignas(64) double x[kBlock], y[kBlock], ex[kBlock], sn[kBlock], cs[kBlock],
        tv[kBlock], tdv[kBlock];
    const double qs = bra.q[j] - qbar, ps = bra.p[j] - pbar;
    const double re = -0.25 * g * qs * qs - 0.25 * ps * ps / g;
    const double im = 0.5 * ps * qs + pbar * qs;
    const double e = std::exp(re);
    const cplx aj = std::conj(bra.coeff[j]) * cplx(e * std::cos(im), e * std::sin(im));
    const double ar = aj.real(), ai = aj.imag();
    const double xq = half_g * qs, xp = ps * inv2g;
    const double yq = 0.5 * qs, yp = 0.5 * ps;
    const double xmj = qbar + 0.5 * qs, dpj = -ps * inv2g;
    double sor = 0.0, soi = 0.0, sdr = 0.0, sdi = 0.0;
    for (std::size_t k0 = 0; k0 < nk; k0 += kBlock) {
      const std::size_t n = std::min(kBlock, nk - k0);
      const double* __restrict kqb = kq.data() + k0;
      const double* __restrict kpb = kp.data() + k0;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = xq * kqb[i] + xp * kpb[i];
        y[i] = yq * kpb[i] - yp * kqb[i];
      }
      for (std::size_t i = 0; i < n; ++i) {
        double fi = (xmj + 0.5 * kqb[i] - mu.r0) * mu.inv_dr;
        fi = fi < 0.0 ? 0.0 : (fi > fi_hi ? fi_hi : fi);
        const std::size_t i0 = std::min(static_cast<std::size_t>(fi), seg_last);
        const double t = fi - static_cast<double>(i0);
        tv[i] = mu.v[i0] + t * (mu.v[i0 + 1] - mu.v[i0]);
        tdv[i] = mu.dv[i0] + t * (mu.dv[i0 + 1] - mu.dv[i0]);
      }
      vec::exp_n(ex, x, n);
      vec::sin_n(sn, y, n);
      vec::cos_n(cs, y, n);
      const double* __restrict frb = fr_.data() + k0;
      const double* __restrict fib = fi_.data() + k0;
      for (std::size_t i = 0; i < n; ++i) {
        const double tr = ar * frb[i] - ai * fib[i];
        const double ti = ar * fib[i] + ai * frb[i];
        const double ovr = ex[i] * (tr * cs[i] - ti * sn[i]);
        const double ovi = ex[i] * (tr * sn[i] + ti * cs[i]);
        const double dpc = (dpj + inv2g * kpb[i]) * tdv[i];
        sor += ovr;
        soi += ovi;
        sdr += ovr * tv[i] - ovi * dpc;
        sdi += ovi * tv[i] + ovr * dpc;
      }
    }
    return Two{cplx(sor, soi), cplx(sdr, sdi)};
  });
  CostCounters::global().pair_evals += static_cast<std::int64_t>(nb * nk);
  return {total.o, total.d};
}

}  // namespace lcross
