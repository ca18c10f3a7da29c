#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcross/cost.hpp"
#include "lcross/curve_set.hpp"
#include "lcross/curves.hpp"
#include "lcross/hk/coherent.hpp"
#include "lcross/laser.hpp"
#include "lcross/numeric/parallel.hpp"
#include "lcross/numeric/rng.hpp"

namespace lcross {

// Semiclassical initial-value propagation with frozen Gaussians:
//   psi(x,t) ~ (1/N) sum_j R_j e^{i S_j} g_{q_j(t),p_j(t)}(x) / <psi0|g_j(0)>
// with (q,p) drawn from the phase-space density |<g_{q,p}|psi0>|^2 and the
// prefactor R accumulated from the monodromy matrix along each trajectory,
//   R^2 = (M_qq + M_pp - i gamma M_qp + i M_pq / gamma) / 2.
// The square root needs a continuous phase; R^2 is unwrapped step to step and
// a jump of its argument near pi aborts the run as an undersampled case.

// Potential seen by a trajectory: value and two derivatives at (r, t).
using SurfaceFunc = std::function<PotPoint(double r, double t)>;

inline SurfaceFunc make_surface(const CurveSum& v) {
  return [&v](double r, double) { return v.eval(r); };
}

// Single surface driven through a permanent dipole: V(r) - eps(t) mu(r).
// The curve sums must outlive the returned function; the field is copied.
inline SurfaceFunc make_driven_surface(const CurveSum& v, const CurveSum& mu,
                                       Field field) {
  return [&v, &mu, field](double r, double t) {
    PotPoint pv = v.eval(r);
    const PotPoint pm = mu.eval(r);
    const double e = field_value(field, t);
    pv.v -= e * pm.v;
    pv.dv -= e * pm.dv;
    pv.d2v -= e * pm.d2v;
    return pv;
  };
}

// Initial Gaussian packet (matches WaveFunction::gaussian).
struct PacketSpec {
  double center = 0.0;
  double sigma = 1.0;
  double p0 = 0.0;
};

struct HkParams {
  double gamma = 0.0;  // 0: use the packet-matched value 1/(2 sigma^2)
  std::size_t n_traj = 1000;
  std::uint64_t seed = 1;
  double r_min = -1e30;  // trajectories below are dropped from the ensemble
  double r_max = 1e30;   // beyond, the surface is frozen flat at its edge value
  double max_arg_jump = 0.9 * M_PI;
};

struct HkTrajectory {
  double q = 0.0, p = 0.0;
  double s = 0.0;                               // action integral
  double mqq = 1.0, mqp = 0.0, mpq = 0.0, mpp = 1.0;
  cplx r2{1.0, 0.0};                            // current squared prefactor
  double phase = 0.0;                           // unwrapped arg of r2
  cplx w{0.0, 0.0};                             // sampling weight 1/(N <psi0|g>)
  PotPoint pot;                                 // surface at (q, t), reused next step
  bool pot_ready = false;                       // false after a surface change
  bool alive = true;
};

// Shared per-trajectory stepping context. Pulled out of the ensemble so the
// multi-surface branching propagator advances trajectories with literally the
// same arithmetic (the decoupled limit must match the single-surface result).
struct StepContext {
  double mass = 1.0;
  double gamma = 1.0;
  double max_arg_jump = 0.9 * M_PI;
  double r_max = 1e30;
};

inline PotPoint eval_surface_frozen(const SurfaceFunc& surf, double q, double t,
                                    double r_max) {
  if (q > r_max) {
    PotPoint p = surf(r_max, t);
    p.dv = 0.0;
    p.d2v = 0.0;
    return p;
  }
  return surf(q, t);
}

// One velocity-Verlet step with the matching monodromy shears, action, and
// prefactor phase tracking. dt may be negative (reverse propagation).
inline void advance_trajectory(HkTrajectory& tr, const SurfaceFunc& surf,
                               const StepContext& cx, double t, double dt) {
  if (!tr.pot_ready) {
    tr.pot = eval_surface_frozen(surf, tr.q, t, cx.r_max);
    tr.pot_ready = true;
  }
  const PotPoint p0 = tr.pot;
  // kick (half), monodromy shear in the momentum rows
  const double ph = tr.p - 0.5 * dt * p0.dv;
  double mpq = tr.mpq - 0.5 * dt * p0.d2v * tr.mqq;
  double mpp = tr.mpp - 0.5 * dt * p0.d2v * tr.mqp;
  // drift
  const double q1 = tr.q + dt * ph / cx.mass;
  const double mqq = tr.mqq + dt / cx.mass * mpq;
  const double mqp = tr.mqp + dt / cx.mass * mpp;
  const PotPoint p1 = eval_surface_frozen(surf, q1, t + dt, cx.r_max);
  // kick (half)
  tr.p = ph - 0.5 * dt * p1.dv;
  tr.mpq = mpq - 0.5 * dt * p1.d2v * mqq;
  tr.mpp = mpp - 0.5 * dt * p1.d2v * mqp;
  tr.q = q1;
  tr.mqq = mqq;
  tr.mqp = mqp;
  tr.s += dt * (0.5 * ph * ph / cx.mass - 0.5 * (p0.v + p1.v));
  tr.pot = p1;
  // prefactor phase, continuous across the square-root branch cut
  const cplx r2(0.5 * (mqq + tr.mpp), 0.5 * (-cx.gamma * mqp + tr.mpq / cx.gamma));
  const double jump = std::arg(r2 / tr.r2);
  if (!(std::abs(jump) < cx.max_arg_jump))
    throw std::runtime_error("trajectory prefactor phase jumped by " +
                             std::to_string(jump) + " in one step; reduce dt");
  tr.phase += jump;
  tr.r2 = r2;
}

class HkEnsemble {
 public:
  HkEnsemble(double mass, HkParams params, PacketSpec packet)
      : mass_(mass), par_(params) {
    if (par_.gamma <= 0.0) par_.gamma = 0.5 / (packet.sigma * packet.sigma);
    if (par_.n_traj == 0) throw std::invalid_argument("HkEnsemble: need trajectories");
    const double sd_q = std::sqrt(husimi_var_q(par_.gamma, packet.sigma));
    const double sd_p = std::sqrt(husimi_var_p(par_.gamma, packet.sigma));
    Rng rng(par_.seed);
    trajs_.resize(par_.n_traj);
    for (auto& tr : trajs_) {
      tr.q = rng.normal(packet.center, sd_q);
      tr.p = rng.normal(packet.p0, sd_p);
      const cplx ov = packet_overlap(par_.gamma, tr.q, tr.p, packet.center, packet.sigma,
                                     packet.p0);
      tr.w = 1.0 / (static_cast<double>(par_.n_traj) * std::conj(ov));
    }
  }

  // Builds an ensemble from explicit phase-space points and weights, for
  // callers that sample against something other than a single packet.
  HkEnsemble(double mass, HkParams params, std::vector<HkTrajectory> trajs)
      : mass_(mass), par_(params), trajs_(std::move(trajs)) {
    if (par_.gamma <= 0.0) throw std::invalid_argument("HkEnsemble: gamma required");
  }

  double gamma() const { return par_.gamma; }
  double mass() const { return mass_; }
  double time() const { return t_; }
  const std::vector<HkTrajectory>& trajectories() const { return trajs_; }
  std::vector<HkTrajectory>& trajectories() { return trajs_; }
  std::size_t n_escaped() const { return n_escaped_; }

  // One velocity-Verlet step of every live trajectory. dt may be negative.
  void step(const SurfaceFunc& surf, double dt) {
    const StepContext cx{mass_, par_.gamma, par_.max_arg_jump, par_.r_max};
    std::int64_t stepped = 0;
    std::size_t died = 0;
    for (auto& tr : trajs_) {
      if (!tr.alive) continue;
      ++stepped;
      advance_trajectory(tr, surf, cx, t_, dt);
      if (tr.q < par_.r_min) {
        tr.alive = false;
        ++died;
      }
    }
    t_ += dt;
    n_escaped_ += died;
    CostCounters::global().traj_steps += stepped;
  }

  void step_many(const SurfaceFunc& surf, double dt, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) step(surf, dt);
  }

  // R_j e^{i S_j} w_j for every live trajectory, bundled with the centers.
  CoherentCloud cloud() const {
    CoherentCloud c;
    c.gamma = par_.gamma;
    c.q.reserve(trajs_.size());
    for (const auto& tr : trajs_) {
      if (!tr.alive) continue;
      c.q.push_back(tr.q);
      c.p.push_back(tr.p);
      const cplx r = std::sqrt(std::abs(tr.r2)) * std::exp(cplx(0.0, 0.5 * tr.phase));
      c.coeff.push_back(tr.w * r * std::exp(cplx(0.0, tr.s)));
    }
    return c;
  }

  // <packet|psi(t)> via the closed-form packet overlaps, no grid involved.
  cplx overlap_with_packet(const PacketSpec& packet) const {
    const CoherentCloud c = cloud();
    cplx total = chunked_sum<cplx>(c.size(), [&](std::size_t j) {
      return c.coeff[j] * std::conj(packet_overlap(par_.gamma, c.q[j], c.p[j],
                                                   packet.center, packet.sigma, packet.p0));
    });
    CostCounters::global().pair_evals += static_cast<std::int64_t>(c.size());
    return total;
  }

  // Rescales every weight; used when seeding a reverse run from a projected state.
  void scale(cplx factor) {
    for (auto& tr : trajs_) tr.w *= factor;
  }

 private:
  double mass_;
  HkParams par_;
  std::vector<HkTrajectory> trajs_;
  double t_ = 0.0;
  std::size_t n_escaped_ = 0;
};

}  // namespace lcross
