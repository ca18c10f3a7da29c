#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lcross/curve_set.hpp"
#include "lcross/dressed.hpp"
#include "lcross/hk/hk.hpp"
#include "lcross/laser.hpp"
#include "lcross/numeric/parallel.hpp"
#include "lcross/zn/zn.hpp"

namespace lcross {

// Two dressed electronic curves with a pulse-scaled off-diagonal element:
// diagonals are the photon-shifted diabats, the coupling is any static term
// plus half the pulse envelope times the transition dipole (rotating frame,
// same convention as the two-surface grid stepper). Branching trajectories
// run on the instantaneous eigenvalue curves of this 2x2 matrix.
class DrivenPair {
 public:
  DrivenPair(const CurveSet& cs, int i, int j, double omega, Field field)
      : cs_(&cs), i_(i), j_(j), field_(std::move(field)) {
    if (i < 0 || j < 0 || i >= cs.n() || j >= cs.n() || i == j)
      throw std::invalid_argument("DrivenPair: bad surface pair");
    shift_i_ = cs.photon_count(i) * omega;
    shift_j_ = cs.photon_count(j) * omega;
    const auto key = CurveSet::ordered(i, j);
    if (const auto it = cs.couplings.find(key); it != cs.couplings.end())
      static_c_ = &it->second;
    if (const auto it = cs.dipoles.find(key); it != cs.dipoles.end())
      dipole_ = &it->second;
  }

  int diabat_i() const { return i_; }
  int diabat_j() const { return j_; }
  double envelope(double t) const { return field_envelope(field_, t); }
  bool statically_coupled() const { return static_c_ != nullptr; }
  bool dipole_coupled() const { return dipole_ != nullptr; }
  double diag_shift(int diabat) const { return diabat == i_ ? shift_i_ : shift_j_; }

  double coupling_value(double r, double t) const {
    double c = static_c_ ? static_c_->value(r) : 0.0;
    if (dipole_) c += 0.5 * envelope(t) * dipole_->value(r);
    return c;
  }

  // Adiabatic curve (0 = lower, 1 = upper) with fused derivatives, the same
  // mean/gap/rho algebra as the static crossing analysis but with the
  // time-dependent coupling.
  PotPoint adiabat(int which, double r, double t) const {
    PotPoint a = cs_->surfaces[i_].eval(r);
    a.v -= shift_i_;
    PotPoint b = cs_->surfaces[j_].eval(r);
    b.v -= shift_j_;
    PotPoint c{0.0, 0.0, 0.0};
    if (static_c_) c += static_c_->eval(r);
    if (dipole_) {
      const double s = 0.5 * envelope(t);
      const PotPoint d = dipole_->eval(r);
      c.v += s * d.v;
      c.dv += s * d.dv;
      c.d2v += s * d.d2v;
    }
    const double mean = 0.5 * (a.v + b.v);
    const double gap = 0.5 * (a.v - b.v);
    const double dgap = 0.5 * (a.dv - b.dv);
    const double d2gap = 0.5 * (a.d2v - b.d2v);
    double rho = std::sqrt(gap * gap + c.v * c.v);
    if (rho < 1e-300) rho = 1e-300;  // exact degeneracy, keep finite
    const double sgn = which == 1 ? 1.0 : -1.0;
    const double s1 = gap * dgap + c.v * c.dv;
    const double q2 = dgap * dgap + gap * d2gap + c.dv * c.dv + c.v * c.d2v;
    PotPoint out;
    out.v = mean + sgn * rho;
    out.dv = 0.5 * (a.dv + b.dv) + sgn * s1 / rho;
    out.d2v = 0.5 * (a.d2v + b.d2v) + sgn * (q2 / rho - s1 * s1 / (rho * rho * rho));
    return out;
  }

  // Diabat carrying most of the adiabatic state `which` at (r, t).
  int dominant_diabat(int which, double r, double t) const {
    const double wi = cs_->v(i_, r) - shift_i_;
    const double wj = cs_->v(j_, r) - shift_j_;
    const double c = coupling_value(r, t);
    if (c == 0.0) {
      const bool i_lower = wi <= wj;
      return ((which == 0) == i_lower) ? i_ : j_;
    }
    const double mean = 0.5 * (wi + wj);
    const double gap = 0.5 * (wi - wj);
    const double rho = std::sqrt(gap * gap + c * c);
    const double lam = which == 1 ? mean + rho : mean - rho;
    // eigenvector ~ (c, lam - wi): larger component wins
    return std::abs(c) >= std::abs(lam - wi) ? i_ : j_;
  }

 private:
  const CurveSet* cs_;
  int i_, j_;
  double shift_i_ = 0.0, shift_j_ = 0.0;
  const CurveSum* static_c_ = nullptr;
  const CurveSum* dipole_ = nullptr;
  Field field_;
};

// One crossing passage in a branch's history.
struct BranchEvent {
  int crossing = 0;        // index into the run's crossing list
  bool hopped = false;     // switched adiabat at this passage
  bool forbidden = false;  // hop blocked by energy, share kept in this branch
  double t = 0.0;          // event time, linear interpolation within the step
};

struct BranchingTrajectory {
  HkTrajectory core;
  int surface = 0;  // adiabat index: 0 lower, 1 upper
  int diabat = 0;   // dominant diabat at the final time, set by the driver
  cplx amp{1.0, 0.0};
  std::uint32_t seed_id = 0;
  std::vector<BranchEvent> lineage;
};

struct BranchingParams {
  HkParams hk;
  double prune_amp = 0.05;      // branches with |A| below this are dropped
  std::size_t branch_cap = 64;  // live branches allowed per seed
  double stokes_phase = 0.0;    // subtracted from the -pi/2 hop phase
  bool use_lz = false;          // Landau-Zener probabilities instead of ZN
};

// Probability ledger, all weights are means over seeds so a lossless run has
// retained + pruned + escaped = 1. forbidden_folded stays inside `retained`
// (a blocked hop leaves its share on the stay branch); it is reported so the
// size of that correction is visible.
struct BranchReport {
  std::size_t n_passages = 0;
  std::size_t n_hops = 0;       // spawned or relabeled hop branches
  std::size_t n_forbidden = 0;  // energy-blocked hops
  std::size_t n_pruned = 0;
  std::size_t max_branches = 1;  // largest live-branch count of any seed
  double retained = 0.0;
  double pruned = 0.0;
  double escaped = 0.0;
  double forbidden_folded = 0.0;
  bool decoupled = false;  // ran as plain single-surface propagation
};

struct BranchingProblem {
  const CurveSet* cs = nullptr;
  int pair_i = 0, pair_j = 1;
  int init_diabat = 0;  // diabat carrying the initial packet
  double omega = 0.0;   // dressing quantum; 0 takes the field carrier
  Field field = ZeroField{};
  PacketSpec packet;
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t n_steps = 0;
  double scan_lo = 0.5, scan_hi = 30.0;  // crossing search window
};

struct BranchingResult {
  std::vector<BranchingTrajectory> branches;  // retained branches at t_final
  std::vector<CrossingPoint> crossings;
  BranchReport report;
  double gamma = 0.0;
  double mass = 0.0;
  double t_final = 0.0;
  std::size_t n_seeds = 0;

  // |A|^2-weighted population on one diabat (mean over seeds).
  double population(int diabat) const {
    double s = 0.0;
    for (const auto& b : branches)
      if (b.diabat == diabat) s += std::norm(b.amp);
    return s / static_cast<double>(n_seeds);
  }

  // Per-diabat frozen-Gaussian cloud; coefficients carry the branch
  // amplitudes, so reconstruction and overlaps work as in the single-surface
  // propagator.
  CoherentCloud cloud(int diabat) const {
    CoherentCloud c;
    c.gamma = gamma;
    for (const auto& b : branches) {
      if (b.diabat != diabat) continue;
      c.q.push_back(b.core.q);
      c.p.push_back(b.core.p);
      const cplx r = std::sqrt(std::abs(b.core.r2)) * std::exp(cplx(0.0, 0.5 * b.core.phase));
      cplx coeff = b.core.w * r * std::exp(cplx(0.0, b.core.s));
      coeff *= b.amp;
      c.coeff.push_back(coeff);
    }
    return c;
  }
};

// Result of a surface-switching step: the drift momentum and the two curve
// values at the crossing feed the transition probability and the energy
// bookkeeping. allowed = false means the target curve is out of reach there
// (the trajectory state is then half-written and must be discarded).
struct SwitchStep {
  bool allowed = false;
  double p_half = 0.0;
  double w_from = 0.0, w_to = 0.0;
};

// One Verlet step that changes surface where the drift crosses r_x: half kick
// on `from` at the step start, drift to the crossing, momentum rescale that
// moves the kinetic energy between the curve values there, drift on, half
// kick on `to` at the step end. Derivatives are never evaluated at the
// crossing itself; for a weakly avoided crossing the adiabatic curvature
// spikes as 1/gap there and pointwise kicks would blow up the monodromy.
// The shears mirror the plain step, so (S, M, R) stay continuous through the
// switch.
inline SwitchStep advance_switching(HkTrajectory& tr, const SurfaceFunc& from,
                                    const SurfaceFunc& to, double r_x,
                                    const StepContext& cx, double t, double dt) {
  SwitchStep out;
  if (!tr.pot_ready) {
    tr.pot = eval_surface_frozen(from, tr.q, t, cx.r_max);
    tr.pot_ready = true;
  }
  const PotPoint p0 = tr.pot;
  const double ph = tr.p - 0.5 * dt * p0.dv;
  const double mpq = tr.mpq - 0.5 * dt * p0.d2v * tr.mqq;
  const double mpp = tr.mpp - 0.5 * dt * p0.d2v * tr.mqp;
  const double delta = (r_x - tr.q) * cx.mass / ph;
  const double t_ev = t + delta;
  out.p_half = ph;
  out.w_from = eval_surface_frozen(from, r_x, t_ev, cx.r_max).v;
  out.w_to = eval_surface_frozen(to, r_x, t_ev, cx.r_max).v;
  const double p2 = ph * ph + 2.0 * cx.mass * (out.w_from - out.w_to);
  if (!(p2 > 0.0) || !std::isfinite(delta)) return out;
  out.allowed = true;
  const double ph2 = (ph < 0.0 ? -1.0 : 1.0) * std::sqrt(p2);
  const double q1 = r_x + (dt - delta) * ph2 / cx.mass;
  const double mqq = tr.mqq + dt / cx.mass * mpq;
  const double mqp = tr.mqp + dt / cx.mass * mpp;
  const PotPoint p1 = eval_surface_frozen(to, q1, t + dt, cx.r_max);
  tr.p = ph2 - 0.5 * dt * p1.dv;
  tr.mpq = mpq - 0.5 * dt * p1.d2v * mqq;
  tr.mpp = mpp - 0.5 * dt * p1.d2v * mqp;
  tr.q = q1;
  tr.mqq = mqq;
  tr.mqp = mqp;
  tr.s += delta * (0.5 * ph * ph / cx.mass) +
          (dt - delta) * (0.5 * ph2 * ph2 / cx.mass) - dt * 0.5 * (p0.v + p1.v);
  tr.pot = p1;
  const cplx r2(0.5 * (mqq + tr.mpp), 0.5 * (-cx.gamma * mqp + tr.mpq / cx.gamma));
  const double jump = std::arg(r2 / tr.r2);
  if (!(std::abs(jump) < cx.max_arg_jump))
    throw std::runtime_error("trajectory prefactor phase jumped by " +
                             std::to_string(jump) + " in one step; reduce dt");
  tr.phase += jump;
  tr.r2 = r2;
  return out;
}

namespace detail {

struct SeedOutcome {
  std::vector<BranchingTrajectory> branches;
  std::size_t n_passages = 0, n_hops = 0, n_forbidden = 0, n_pruned = 0;
  std::size_t max_live = 1;
  double retained = 0.0, pruned = 0.0, escaped = 0.0, forbidden_folded = 0.0;
  std::exception_ptr error;
};

inline std::size_t count_live(const std::vector<BranchingTrajectory>& v) {
  std::size_t n = 0;
  for (const auto& b : v)
    if (b.core.alive) ++n;
  return n;
}

}  // namespace detail

// Multi-surface frozen-Gaussian propagation. Seeds are sampled exactly like
// the single-surface ensemble; each seed evolves on the adiabats of the
// driven pair and splits into a stay and a hop branch at every crossing
// passage, with one-passage transition probabilities from the crossing
// geometry. With the coupling identically zero (no static term and a field
// that never turns on) the run degenerates to the single-surface propagator
// and reproduces it bit for bit.
inline BranchingResult propagate_branching(const BranchingProblem& prob,
                                           const BranchingParams& par,
                                           unsigned workers = 0) {
  if (!prob.cs) throw std::invalid_argument("propagate_branching: null curve set");
  const CurveSet& cs = *prob.cs;
  cs.validate();
  if (prob.init_diabat != prob.pair_i && prob.init_diabat != prob.pair_j)
    throw std::invalid_argument("propagate_branching: init_diabat not in the pair");
  const double omega = prob.omega != 0.0 ? prob.omega : field_carrier(prob.field);
  const DrivenPair pair(cs, prob.pair_i, prob.pair_j, omega, prob.field);
  const double t_final = prob.t0 + static_cast<double>(prob.n_steps) * prob.dt;

  // Crossing geometry of the photon-shifted diabats. The field-free
  // off-diagonal recorded here is informational; transition probabilities use
  // the driven coupling at the event time.
  const DressedSet ds{&cs, omega, 0.0};
  std::vector<CrossingPoint> crossings;
  for (const auto& cp : find_crossings(ds, prob.scan_lo, prob.scan_hi)) {
    const auto key = CurveSet::ordered(prob.pair_i, prob.pair_j);
    if (cp.i == key.first && cp.j == key.second) crossings.push_back(cp);
  }

  // Seed sampling shared with the single-surface ensemble.
  HkEnsemble seeds(cs.mass, par.hk, prob.packet);

  BranchingResult out;
  out.crossings = crossings;
  out.gamma = seeds.gamma();
  out.mass = cs.mass;
  out.t_final = t_final;
  out.n_seeds = seeds.trajectories().size();

  bool driven = pair.dipole_coupled();
  if (driven) {
    double peak = 0.0;
    for (std::size_t k = 0; k <= prob.n_steps; ++k)
      peak = std::max(peak, std::abs(pair.envelope(prob.t0 + static_cast<double>(k) * prob.dt)));
    driven = peak != 0.0;
  }

  if (!pair.statically_coupled() && !driven) {
    // Decoupled limit: plain propagation on the initial dressed diabat,
    // through the identical single-surface code path.
    const CurveSum& diab = cs.surfaces[prob.init_diabat];
    const double shift = pair.diag_shift(prob.init_diabat);
    const SurfaceFunc surf = [&diab, shift](double r, double) {
      PotPoint p = diab.eval(r);
      p.v -= shift;
      return p;
    };
    seeds.step_many(surf, prob.dt, prob.n_steps);
    std::uint32_t idx = 0;
    for (const auto& tr : seeds.trajectories()) {
      if (tr.alive) {
        BranchingTrajectory b;
        b.core = tr;
        b.surface = pair.dominant_diabat(0, tr.q, t_final) == prob.init_diabat ? 0 : 1;
        b.diabat = prob.init_diabat;
        b.seed_id = idx;
        out.branches.push_back(std::move(b));
      }
      ++idx;
    }
    const double n = static_cast<double>(out.n_seeds);
    out.report.decoupled = true;
    out.report.retained = static_cast<double>(out.branches.size()) / n;
    out.report.escaped = static_cast<double>(seeds.n_escaped()) / n;
    return out;
  }

  const StepContext cx{cs.mass, seeds.gamma(), par.hk.max_arg_jump, par.hk.r_max};
  const SurfaceFunc surf[2] = {
      [&pair](double r, double t) { return pair.adiabat(0, r, t); },
      [&pair](double r, double t) { return pair.adiabat(1, r, t); },
  };
  const cplx hop_rot = std::exp(cplx(0.0, -0.5 * M_PI - par.stokes_phase));

  const auto& init = seeds.trajectories();
  std::vector<detail::SeedOutcome> outs(init.size());

  parallel_for(
      init.size(),
      [&](std::size_t si) {
        detail::SeedOutcome& so = outs[si];
        try {
          std::vector<BranchingTrajectory> live;
          {
            BranchingTrajectory b0;
            b0.core = init[si];
            b0.seed_id = static_cast<std::uint32_t>(si);
            b0.surface =
                pair.dominant_diabat(0, init[si].q, prob.t0) == prob.init_diabat ? 0 : 1;
            live.push_back(std::move(b0));
          }
          for (std::size_t k = 0; k < prob.n_steps; ++k) {
            const double t = prob.t0 + static_cast<double>(k) * prob.dt;
            const std::size_t n_now = live.size();
            for (std::size_t bi = 0; bi < n_now; ++bi) {
              if (!live[bi].core.alive) continue;
              const HkTrajectory pre = live[bi].core;
              const int s_pre = live[bi].surface;
              advance_trajectory(live[bi].core, surf[s_pre], cx, t, prob.dt);
              if (live[bi].core.q < par.hk.r_min) {
                live[bi].core.alive = false;
                so.escaped += std::norm(live[bi].amp);
                continue;
              }

              // nearest crossing straddled during this step
              int ci = -1;
              double delta = 0.0;
              for (int c = 0; c < static_cast<int>(crossings.size()); ++c) {
                const double a = pre.q - crossings[c].r_x;
                const double b = live[bi].core.q - crossings[c].r_x;
                if (a * b < 0.0) {
                  const double d =
                      prob.dt * (crossings[c].r_x - pre.q) / (live[bi].core.q - pre.q);
                  if (ci < 0 || d < delta) {
                    ci = c;
                    delta = d;
                  }
                }
              }
              if (ci < 0) continue;
              const CrossingPoint& cp = crossings[ci];
              const double t_ev = t + delta;
              const double v_pre =
                  pre.pot_ready ? pre.pot.v
                                : eval_surface_frozen(surf[s_pre], pre.q, t, cx.r_max).v;
              const double e_pre = 0.5 * pre.p * pre.p / cs.mass + v_pre;
              if (!(e_pre > pair.adiabat(s_pre, cp.r_x, t_ev).v)) continue;
              ++so.n_passages;

              // hop candidate: redo the step as a surface switch at r_x
              BranchingTrajectory hop;
              hop.core = pre;
              hop.surface = s_pre;
              hop.seed_id = live[bi].seed_id;
              const SwitchStep sw = advance_switching(hop.core, surf[s_pre],
                                                      surf[1 - s_pre], cp.r_x, cx,
                                                      t, prob.dt);
              const double e_ev = 0.5 * sw.p_half * sw.p_half / cs.mass + sw.w_from;
              const double v12 = std::abs(pair.coupling_value(cp.r_x, t_ev));
              double p_hop = 1.0;  // uncoupled crossing passes diabatically
              if (v12 > 0.0) {
                ZnInput zi;
                zi.v12 = v12;
                zi.f1 = cp.f_i;
                zi.f2 = cp.f_j;
                zi.mass = cs.mass;
                zi.e_x = cp.e_x;
                p_hop = par.use_lz ? lz_probability(zi, e_ev) : zn_probability(zi, e_ev);
              }

              const cplx a_pre = live[bi].amp;
              if (!sw.allowed) {
                // target curve out of reach: the whole amplitude stays
                ++so.n_forbidden;
                so.forbidden_folded += std::norm(a_pre) * p_hop;
                live[bi].lineage.push_back({ci, false, true, t_ev});
                continue;
              }
              if (p_hop >= 1.0 - 1e-12) {
                // certain passage: relabel in place, no second branch
                hop.surface = 1 - s_pre;
                hop.amp = a_pre * std::sqrt(p_hop) * hop_rot;
                hop.lineage = std::move(live[bi].lineage);
                hop.lineage.push_back({ci, true, false, t_ev});
                if (hop.core.q < par.hk.r_min) {
                  hop.core.alive = false;
                  so.escaped += std::norm(hop.amp);
                }
                ++so.n_hops;
                live[bi] = std::move(hop);
                continue;
              }
              if (p_hop <= 1e-12) {
                live[bi].amp = a_pre * std::sqrt(1.0 - p_hop);
                live[bi].lineage.push_back({ci, false, false, t_ev});
                continue;
              }

              // two-way split
              live[bi].amp = a_pre * std::sqrt(1.0 - p_hop);
              live[bi].lineage.push_back({ci, false, false, t_ev});
              if (std::abs(live[bi].amp) < par.prune_amp) {
                so.pruned += std::norm(live[bi].amp);
                ++so.n_pruned;
                live[bi].core.alive = false;
              }
              hop.surface = 1 - s_pre;
              hop.amp = a_pre * std::sqrt(p_hop) * hop_rot;
              hop.lineage = live[bi].lineage;
              hop.lineage.back() = {ci, true, false, t_ev};
              ++so.n_hops;
              if (hop.core.q < par.hk.r_min) {
                hop.core.alive = false;
                so.escaped += std::norm(hop.amp);
              } else if (std::abs(hop.amp) < par.prune_amp) {
                so.pruned += std::norm(hop.amp);
                ++so.n_pruned;
              } else {
                const std::size_t n_live = detail::count_live(live);
                if (n_live + 1 > par.branch_cap) {
                  std::ostringstream msg;
                  msg << "propagate_branching: seed " << si << " needs more than "
                      << par.branch_cap
                      << " live branches with amplitudes above the prune threshold "
                      << par.prune_amp << "; raise branch_cap or prune_amp";
                  throw std::runtime_error(msg.str());
                }
                live.push_back(std::move(hop));
              }
            }
            so.max_live = std::max(so.max_live, detail::count_live(live));
          }
          for (auto& b : live) {
            if (!b.core.alive) continue;
            so.retained += std::norm(b.amp);
            b.diabat = pair.dominant_diabat(b.surface, b.core.q, t_final);
            so.branches.push_back(std::move(b));
          }
        } catch (...) {
          so.error = std::current_exception();
        }
      },
      workers, 16);

  for (const auto& so : outs)
    if (so.error) std::rethrow_exception(so.error);

  const double n = static_cast<double>(out.n_seeds);
  for (auto& so : outs) {
    out.report.n_passages += so.n_passages;
    out.report.n_hops += so.n_hops;
    out.report.n_forbidden += so.n_forbidden;
    out.report.n_pruned += so.n_pruned;
    out.report.max_branches = std::max(out.report.max_branches, so.max_live);
    out.report.retained += so.retained / n;
    out.report.pruned += so.pruned / n;
    out.report.escaped += so.escaped / n;
    out.report.forbidden_folded += so.forbidden_folded / n;
    for (auto& b : so.branches) out.branches.push_back(std::move(b));
  }
  return out;
}

// Human-readable pruning report: counters, weight ledger, and the final
// branch-count histogram over seeds.
inline std::string branch_report_text(const BranchingResult& res) {
  std::ostringstream os;
  const auto& r = res.report;
  os << "mode " << (r.decoupled ? "decoupled" : "branching") << "\n"
     << "seeds " << res.n_seeds << "\n"
     << "passages " << r.n_passages << "\n"
     << "hops " << r.n_hops << "\n"
     << "forbidden hops " << r.n_forbidden << "\n"
     << "pruned branches " << r.n_pruned << "\n"
     << "max live branches per seed " << r.max_branches << "\n"
     << "retained weight " << r.retained << "\n"
     << "pruned weight " << r.pruned << "\n"
     << "escaped weight " << r.escaped << "\n"
     << "forbidden folded weight " << r.forbidden_folded << "\n";
  std::map<std::size_t, std::size_t> hist;
  {
    std::map<std::uint32_t, std::size_t> per_seed;
    for (const auto& b : res.branches) ++per_seed[b.seed_id];
    for (const auto& [seed, cnt] : per_seed) {
      (void)seed;
      ++hist[cnt];
    }
    std::size_t with_branches = per_seed.size();
    if (res.n_seeds > with_branches) hist[0] += res.n_seeds - with_branches;
  }
  for (const auto& [cnt, seeds] : hist)
    os << "seeds with " << cnt << " final branches: " << seeds << "\n";
  return os.str();
}

}  // namespace lcross
