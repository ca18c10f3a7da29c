#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lcross/cost.hpp"
#include "lcross/curve_set.hpp"
#include "lcross/grid.hpp"
#include "lcross/laser.hpp"
#include "lcross/numeric/eigen_sym.hpp"
#include "lcross/numeric/fft.hpp"
#include "lcross/wavefunction.hpp"

namespace lcross {

// --- absorbing boundaries ---------------------------------------------------

// Monomial damping ramp: gamma(r) = eta ((r - start)/(edge - start))^order
// inside the absorbing strip. Applied as exp(-gamma dt/2) after each
// potential half step, i.e. exp(-gamma dt) per full step.
struct CapRegion {
  double start;
  double eta = 0.05;
  int order = 3;
};

struct Absorber {
  std::optional<CapRegion> right;
  std::optional<CapRegion> left;

  std::vector<double> half_step_factors(const Grid& g, double dt) const {
    std::vector<double> f(g.n, 1.0);
    if (right) {
      const double span = g.r_last() - right->start;
      if (!(span > 0.0)) throw std::invalid_argument("Absorber: right start past grid edge");
      for (std::size_t i = 0; i < g.n; ++i) {
        const double r = g.r(i);
        if (r > right->start) {
          const double z = (r - right->start) / span;
          f[i] *= std::exp(-right->eta * std::pow(z, right->order) * 0.5 * dt);
        }
      }
    }
    if (left) {
      const double span = left->start - g.r0;
      if (!(span > 0.0)) throw std::invalid_argument("Absorber: left start before grid edge");
      for (std::size_t i = 0; i < g.n; ++i) {
        const double r = g.r(i);
        if (r < left->start) {
          const double z = (left->start - r) / span;
          f[i] *= std::exp(-left->eta * std::pow(z, left->order) * 0.5 * dt);
        }
      }
    }
    return f;
  }
};

// --- potential half-step strategies ------------------------------------------

enum class FieldMode { None, Explicit, Rotating };

// Applies exp(-i W(r, t) tau) in surface space, pointwise over the grid, and
// W itself for diagnostics. Implementations precompute whatever the coupling
// structure allows.
class PotentialStepper {
 public:
  virtual ~PotentialStepper() = default;
  virtual void half_step(WaveFunction& psi, double t, double tau) = 0;
  virtual void apply_w(const WaveFunction& in, WaveFunction& out, double t) const = 0;
  virtual std::size_t n_surfaces() const = 0;
  double mass() const { return mass_; }

 protected:
  explicit PotentialStepper(double mass) : mass_(mass) {}
  double mass_;
};

namespace detail {

struct FieldCoupling {
  // Scale multiplying mu_ij at time t for the off-diagonal entries, and the
  // scale for diagonal (permanent) dipoles. In the rotating frame permanent
  // dipoles average to zero.
  static double offdiag_scale(FieldMode mode, const Field& f, double t) {
    switch (mode) {
      case FieldMode::None: return 0.0;
      case FieldMode::Explicit: return -field_value(f, t);
      case FieldMode::Rotating: return 0.5 * field_envelope(f, t);
    }
    return 0.0;
  }
  static double diag_scale(FieldMode mode, const Field& f, double t) {
    return mode == FieldMode::Explicit ? -field_value(f, t) : 0.0;
  }
  static bool time_independent(FieldMode mode, const Field& f) {
    if (mode == FieldMode::None) return true;
    if (std::holds_alternative<ZeroField>(f)) return true;
    if (mode == FieldMode::Rotating && std::holds_alternative<CwField>(f)) return true;
    return false;
  }
};

inline std::vector<double> sample_diag(const CurveSet& cs, const Grid& g, int surf,
                                       double omega) {
  std::vector<double> v(g.n);
  const double shift = cs.photon_count(surf) * omega;
  for (std::size_t i = 0; i < g.n; ++i) v[i] = cs.v(surf, g.r(i)) - shift;
  return v;
}

inline std::vector<double> sample_sum(const CurveSum* c, const Grid& g) {
  std::vector<double> v(g.n, 0.0);
  if (c)
    for (std::size_t i = 0; i < g.n; ++i) v[i] = c->value(g.r(i));
  return v;
}

inline const CurveSum* find_sum(const std::map<std::pair<int, int>, CurveSum>& m, int i,
                                int j) {
  const auto it = m.find(CurveSet::ordered(i, j));
  return it == m.end() ? nullptr : &it->second;
}

}  // namespace detail

// Single surface: a diagonal phase, plus the permanent-dipole term when the
// field is explicit.
class DiagonalStepper final : public PotentialStepper {
 public:
  DiagonalStepper(const CurveSet& cs, const Grid& g, const Field& field, FieldMode mode,
                  double omega)
      : PotentialStepper(cs.mass), field_(field), mode_(mode) {
    if (cs.n() != 1) throw std::invalid_argument("DiagonalStepper: needs one surface");
    v_ = detail::sample_diag(cs, g, 0, mode == FieldMode::Rotating ? omega : 0.0);
    mu_ = detail::sample_sum(detail::find_sum(cs.dipoles, 0, 0), g);
    has_mu_ = detail::find_sum(cs.dipoles, 0, 0) != nullptr;
  }

  void half_step(WaveFunction& psi, double t, double tau) override {
    ensure_phase(tau);
    auto& p = psi.psi[0];
    const double ds = detail::FieldCoupling::diag_scale(mode_, field_, t);
    if (has_mu_ && ds != 0.0) {
      for (std::size_t i = 0; i < v_.size(); ++i) {
        const double ang = -ds * mu_[i] * tau;  // exp(-i ds mu tau) folded in
        p[i] *= phase_[i] * cplx(std::cos(ang), std::sin(ang));
      }
    } else {
      for (std::size_t i = 0; i < v_.size(); ++i) p[i] *= phase_[i];
    }
  }

  void apply_w(const WaveFunction& in, WaveFunction& out, double t) const override {
    const double ds = detail::FieldCoupling::diag_scale(mode_, field_, t);
    for (std::size_t i = 0; i < v_.size(); ++i)
      out.psi[0][i] = (v_[i] + ds * mu_[i]) * in.psi[0][i];
  }

  std::size_t n_surfaces() const override { return 1; }

 private:
  void ensure_phase(double tau) {
    if (tau == cached_tau_) return;
    phase_.resize(v_.size());
    for (std::size_t i = 0; i < v_.size(); ++i)
      phase_[i] = std::exp(cplx(0.0, -v_[i] * tau));
    cached_tau_ = tau;
  }
  Field field_;
  FieldMode mode_;
  std::vector<double> v_, mu_;
  std::vector<cplx> phase_;
  double cached_tau_ = -1.0;
  bool has_mu_ = false;
};

// Two surfaces: closed-form 2x2 matrix exponential per point. Static coupling
// structures are folded into precomputed factors; time-dependent fields
// re-evaluate the closed form each half step.
class TwoSurfaceStepper final : public PotentialStepper {
 public:
  TwoSurfaceStepper(const CurveSet& cs, const Grid& g, const Field& field, FieldMode mode,
                    double omega)
      : PotentialStepper(cs.mass), field_(field), mode_(mode) {
    if (cs.n() != 2) throw std::invalid_argument("TwoSurfaceStepper: needs two surfaces");
    const double shift_omega =
        mode == FieldMode::Rotating ? (omega != 0.0 ? omega : field_carrier(field)) : 0.0;
    v1_ = detail::sample_diag(cs, g, 0, shift_omega);
    v2_ = detail::sample_diag(cs, g, 1, shift_omega);
    cstat_ = detail::sample_sum(detail::find_sum(cs.couplings, 0, 1), g);
    mu12_ = detail::sample_sum(detail::find_sum(cs.dipoles, 0, 1), g);
    mu11_ = detail::sample_sum(detail::find_sum(cs.dipoles, 0, 0), g);
    mu22_ = detail::sample_sum(detail::find_sum(cs.dipoles, 1, 1), g);
    static_ = detail::FieldCoupling::time_independent(mode, field);
  }

  void half_step(WaveFunction& psi, double t, double tau) override {
    if (static_) {
      ensure_static(t, tau);
      apply_factors(psi);
      return;
    }
    const double cf = detail::FieldCoupling::offdiag_scale(mode_, field_, t);
    const double ds = detail::FieldCoupling::diag_scale(mode_, field_, t);
    auto& p1 = psi.psi[0];
    auto& p2 = psi.psi[1];
    const std::size_t n = v1_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double a = v1_[i] + ds * mu11_[i];
      const double b = v2_[i] + ds * mu22_[i];
      const double c = cstat_[i] + cf * mu12_[i];
      cplx f11, f12, f22;
      point_factors(a, b, c, tau, f11, f12, f22);
      const cplx x = p1[i], y = p2[i];
      p1[i] = f11 * x + f12 * y;
      p2[i] = f12 * x + f22 * y;
    }
  }

  void apply_w(const WaveFunction& in, WaveFunction& out, double t) const override {
    const double cf = detail::FieldCoupling::offdiag_scale(mode_, field_, t);
    const double ds = detail::FieldCoupling::diag_scale(mode_, field_, t);
    const std::size_t n = v1_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double a = v1_[i] + ds * mu11_[i];
      const double b = v2_[i] + ds * mu22_[i];
      const double c = cstat_[i] + cf * mu12_[i];
      out.psi[0][i] = a * in.psi[0][i] + c * in.psi[1][i];
      out.psi[1][i] = c * in.psi[0][i] + b * in.psi[1][i];
    }
  }

  std::size_t n_surfaces() const override { return 2; }

 private:
  // exp(-i tau [[a, c], [c, b]]), symmetric.
  static void point_factors(double a, double b, double c, double tau, cplx& f11, cplx& f12,
                            cplx& f22) {
    const double theta = 0.5 * (a + b);
    const double delta = 0.5 * (a - b);
    const double rho = std::hypot(delta, c);
    const double ang = rho * tau;
    const double cosr = std::cos(ang);
    const double s = rho > 1e-300 ? std::sin(ang) / rho : tau;  // sinc limit
    const cplx ph = std::exp(cplx(0.0, -theta * tau));
    f11 = ph * cplx(cosr, -s * delta);
    f12 = ph * cplx(0.0, -s * c);
    f22 = ph * cplx(cosr, s * delta);
  }

  void ensure_static(double t, double tau) {
    if (have_static_ && tau == cached_tau_) return;
    const double cf = detail::FieldCoupling::offdiag_scale(mode_, field_, t);
    const std::size_t n = v1_.size();
    f11_.resize(n);
    f12_.resize(n);
    f22_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      point_factors(v1_[i], v2_[i], cstat_[i] + cf * mu12_[i], tau, f11_[i], f12_[i],
                    f22_[i]);
    have_static_ = true;
    cached_tau_ = tau;
  }

  void apply_factors(WaveFunction& psi) const {
    auto& p1 = psi.psi[0];
    auto& p2 = psi.psi[1];
    const std::size_t n = f11_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const cplx x = p1[i], y = p2[i];
      p1[i] = f11_[i] * x + f12_[i] * y;
      p2[i] = f12_[i] * x + f22_[i] * y;
    }
  }

  Field field_;
  FieldMode mode_;
  bool static_ = false, have_static_ = false;
  double cached_tau_ = -1.0;
  std::vector<double> v1_, v2_, cstat_, mu12_, mu11_, mu22_;
  std::vector<cplx> f11_, f12_, f22_;
};

// Any surface count, time-independent coupling: one eigendecomposition per
// grid point at setup, matrix-vector products per step.
class StaticMatrixStepper final : public PotentialStepper {
 public:
  StaticMatrixStepper(const CurveSet& cs, const Grid& g, const Field& field, FieldMode mode,
                      double omega)
      : PotentialStepper(cs.mass), ns_(cs.n()) {
    if (!detail::FieldCoupling::time_independent(mode, field))
      throw std::invalid_argument("StaticMatrixStepper: field must be time independent");
    const double shift_omega =
        mode == FieldMode::Rotating ? (omega != 0.0 ? omega : field_carrier(field)) : 0.0;
    const double cf = detail::FieldCoupling::offdiag_scale(mode, field, 0.0);
    w_.assign(g.n * ns_ * ns_, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) {
      const double r = g.r(i);
      double* wp = w_.data() + i * ns_ * ns_;
      for (int s = 0; s < ns_; ++s) {
        wp[s * ns_ + s] = cs.v(s, r) - cs.photon_count(s) * shift_omega;
        for (int u = s + 1; u < ns_; ++u) {
          double c = cs.coupling(s, u, r);
          if (cs.has_dipole(s, u)) c += cf * cs.dipole(s, u, r);
          wp[s * ns_ + u] = wp[u * ns_ + s] = c;
        }
      }
    }
    npts_ = g.n;
  }

  void half_step(WaveFunction& psi, double /*t*/, double tau) override {
    ensure_factors(tau);
    std::vector<cplx> tmp(ns_);
    for (std::size_t i = 0; i < npts_; ++i) {
      const cplx* f = u_.data() + i * ns_ * ns_;
      for (int s = 0; s < ns_; ++s) {
        cplx acc(0.0, 0.0);
        for (int u = 0; u < ns_; ++u) acc += f[s * ns_ + u] * psi.psi[u][i];
        tmp[s] = acc;
      }
      for (int s = 0; s < ns_; ++s) psi.psi[s][i] = tmp[s];
    }
  }

  void apply_w(const WaveFunction& in, WaveFunction& out, double /*t*/) const override {
    for (std::size_t i = 0; i < npts_; ++i) {
      const double* wp = w_.data() + i * ns_ * ns_;
      for (int s = 0; s < ns_; ++s) {
        cplx acc(0.0, 0.0);
        for (int u = 0; u < ns_; ++u) acc += wp[s * ns_ + u] * in.psi[u][i];
        out.psi[s][i] = acc;
      }
    }
  }

  std::size_t n_surfaces() const override { return static_cast<std::size_t>(ns_); }

 private:
  void ensure_factors(double tau) {
    if (tau == cached_tau_) return;
    u_.assign(npts_ * ns_ * ns_, cplx(0.0, 0.0));
    std::vector<double> block(ns_ * ns_);
    for (std::size_t i = 0; i < npts_; ++i) {
      std::copy(w_.begin() + i * ns_ * ns_, w_.begin() + (i + 1) * ns_ * ns_, block.begin());
      const SymEig eig = eig_sym_jacobi(block, ns_);
      cplx* f = u_.data() + i * ns_ * ns_;
      for (int k = 0; k < ns_; ++k) {
        const cplx ph = std::exp(cplx(0.0, -eig.values[k] * tau));
        const double* q = eig.vec(k);
        for (int s = 0; s < ns_; ++s)
          for (int u = 0; u < ns_; ++u) f[s * ns_ + u] += ph * q[s] * q[u];
      }
    }
    cached_tau_ = tau;
  }

  int ns_;
  std::size_t npts_ = 0;
  std::vector<double> w_;
  std::vector<cplx> u_;
  double cached_tau_ = -1.0;
};

// Any surface count with a time-dependent field: eigendecomposition per point
// per half step. The price is steep; the factory only picks this when nothing
// cheaper applies.
class DynamicMatrixStepper final : public PotentialStepper {
 public:
  DynamicMatrixStepper(const CurveSet& cs, const Grid& g, const Field& field, FieldMode mode,
                       double omega)
      : PotentialStepper(cs.mass), cs_(cs), grid_(g), field_(field), mode_(mode) {
    ns_ = cs.n();
    omega_ = mode == FieldMode::Rotating ? (omega != 0.0 ? omega : field_carrier(field)) : 0.0;
  }

  void half_step(WaveFunction& psi, double t, double tau) override {
    std::vector<double> w(ns_ * ns_);
    std::vector<cplx> tmp(ns_);
    for (std::size_t i = 0; i < grid_.n; ++i) {
      build_w(grid_.r(i), t, w.data());
      const SymEig eig = eig_sym_jacobi(w, ns_);
      for (int s = 0; s < ns_; ++s) tmp[s] = cplx(0.0, 0.0);
      for (int k = 0; k < ns_; ++k) {
        const double* q = eig.vec(k);
        cplx proj(0.0, 0.0);
        for (int u = 0; u < ns_; ++u) proj += q[u] * psi.psi[u][i];
        proj *= std::exp(cplx(0.0, -eig.values[k] * tau));
        for (int s = 0; s < ns_; ++s) tmp[s] += q[s] * proj;
      }
      for (int s = 0; s < ns_; ++s) psi.psi[s][i] = tmp[s];
    }
  }

  void apply_w(const WaveFunction& in, WaveFunction& out, double t) const override {
    std::vector<double> w(ns_ * ns_);
    for (std::size_t i = 0; i < grid_.n; ++i) {
      build_w(grid_.r(i), t, w.data());
      for (int s = 0; s < ns_; ++s) {
        cplx acc(0.0, 0.0);
        for (int u = 0; u < ns_; ++u) acc += w[s * ns_ + u] * in.psi[u][i];
        out.psi[s][i] = acc;
      }
    }
  }

  std::size_t n_surfaces() const override { return static_cast<std::size_t>(ns_); }

 private:
  void build_w(double r, double t, double* w) const {
    const double cf = detail::FieldCoupling::offdiag_scale(mode_, field_, t);
    const double ds = detail::FieldCoupling::diag_scale(mode_, field_, t);
    for (int s = 0; s < ns_; ++s) {
      double d = cs_.v(s, r) - cs_.photon_count(s) * omega_;
      if (cs_.has_dipole(s, s)) d += ds * cs_.dipole(s, s, r);
      w[s * ns_ + s] = d;
      for (int u = s + 1; u < ns_; ++u) {
        double c = cs_.coupling(s, u, r);
        if (cs_.has_dipole(s, u)) c += cf * cs_.dipole(s, u, r);
        w[s * ns_ + u] = w[u * ns_ + s] = c;
      }
    }
  }

  CurveSet cs_;
  Grid grid_;
  Field field_;
  FieldMode mode_;
  int ns_;
  double omega_ = 0.0;
};

inline std::unique_ptr<PotentialStepper> make_potential_stepper(const CurveSet& cs,
                                                                const Grid& g,
                                                                const Field& field,
                                                                FieldMode mode,
                                                                double omega = 0.0) {
  cs.validate();
  if (cs.n() == 1) return std::make_unique<DiagonalStepper>(cs, g, field, mode, omega);
  if (cs.n() == 2) return std::make_unique<TwoSurfaceStepper>(cs, g, field, mode, omega);
  if (detail::FieldCoupling::time_independent(mode, field))
    return std::make_unique<StaticMatrixStepper>(cs, g, field, mode, omega);
  return std::make_unique<DynamicMatrixStepper>(cs, g, field, mode, omega);
}

// --- kinetic step and the Strang driver --------------------------------------

class KineticStepper {
 public:
  KineticStepper(const Grid& g, double mass, double dt) : plan_(g.n), inv_n_(1.0 / g.n) {
    const auto ks = g.k_values();
    phase_.resize(g.n);
    for (std::size_t j = 0; j < g.n; ++j)
      phase_[j] = std::exp(cplx(0.0, -ks[j] * ks[j] / (2.0 * mass) * dt));
  }

  void step(WaveFunction& psi) {
    for (auto& surf : psi.psi) {
      plan_.forward(surf.data());
      for (std::size_t j = 0; j < surf.size(); ++j) surf[j] *= phase_[j] * inv_n_;
      plan_.inverse_unscaled(surf.data());
    }
  }

 private:
  FftPlan plan_;
  std::vector<cplx> phase_;
  double inv_n_;
};

struct PropagateOptions {
  double dt = 0.1;
  int n_steps = 0;
  double t0 = 0.0;
  const Absorber* absorber = nullptr;
  // Called before the first step (step 0) and after every observe_every-th
  // step; always called after the final step.
  std::function<void(int step, double t, WaveFunction&)> observer;
  int observe_every = 1;
  int check_every = 250;  // NaN scan cadence
};

namespace detail {

inline void check_finite(const WaveFunction& psi, int step) {
  for (std::size_t s = 0; s < psi.n_surfaces(); ++s)
    for (std::size_t i = 0; i < psi.grid.n; ++i) {
      const cplx& a = psi.psi[s][i];
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        std::ostringstream os;
        os << "propagation produced a non-finite amplitude at step " << step
           << ", surface " << s << ", grid index " << i << " (r = " << psi.grid.r(i)
           << "); reduce dt or enlarge the grid";
        throw std::runtime_error(os.str());
      }
    }
}

}  // namespace detail

// Strang-split propagation: exp(-i W dt/2) exp(-i T dt) exp(-i W dt/2) per
// step, with the field for both potential halves sampled at the step
// midpoint. Absorbing factors multiply after each potential half.
inline void propagate(WaveFunction& psi, PotentialStepper& pot, const PropagateOptions& opt) {
  if (psi.n_surfaces() != pot.n_surfaces())
    throw std::invalid_argument("propagate: surface count mismatch");
  KineticStepper kin(psi.grid, pot.mass(), opt.dt);
  std::vector<double> damp;
  if (opt.absorber) damp = opt.absorber->half_step_factors(psi.grid, opt.dt);
  auto apply_damp = [&]() {
    if (damp.empty()) return;
    for (auto& surf : psi.psi)
      for (std::size_t i = 0; i < surf.size(); ++i) surf[i] *= damp[i];
  };

  if (opt.observer) opt.observer(0, opt.t0, psi);
  const double tau = 0.5 * opt.dt;
  for (int s = 0; s < opt.n_steps; ++s) {
    const double t_mid = opt.t0 + (s + 0.5) * opt.dt;
    pot.half_step(psi, t_mid, tau);
    apply_damp();
    kin.step(psi);
    pot.half_step(psi, t_mid, tau);
    apply_damp();
    const int done = s + 1;
    const double t_now = opt.t0 + done * opt.dt;
    if (opt.observer && (done % opt.observe_every == 0 || done == opt.n_steps))
      opt.observer(done, t_now, psi);
    if (opt.check_every > 0 && done % opt.check_every == 0)
      detail::check_finite(psi, done);
  }
  CostCounters::global().grid_steps += opt.n_steps;
}

// --- energy diagnostics -------------------------------------------------------

inline double kinetic_energy(const WaveFunction& psi, double mass) {
  FftPlan plan(psi.grid.n);
  const auto ks = psi.grid.k_values();
  double acc = 0.0;
  std::vector<cplx> work(psi.grid.n);
  for (const auto& surf : psi.psi) {
    work = surf;
    plan.forward(work.data());
    for (std::size_t j = 0; j < work.size(); ++j)
      acc += std::norm(work[j]) * ks[j] * ks[j];
  }
  // Parseval: sum_k |psi_k|^2 = n sum_i |psi_i|^2; Riemann weight dr.
  return acc * psi.grid.dr / (2.0 * mass * psi.grid.n);
}

inline double potential_energy(const WaveFunction& psi, const PotentialStepper& pot,
                               double t) {
  WaveFunction w = psi;
  pot.apply_w(psi, w, t);
  double acc = 0.0;
  for (std::size_t s = 0; s < psi.n_surfaces(); ++s)
    for (std::size_t i = 0; i < psi.grid.n; ++i)
      acc += (std::conj(psi.psi[s][i]) * w.psi[s][i]).real();
  return acc * psi.grid.dr;
}

inline double total_energy(const WaveFunction& psi, const PotentialStepper& pot, double t,
                           double mass) {
  return kinetic_energy(psi, mass) + potential_energy(psi, pot, t);
}

}  // namespace lcross
