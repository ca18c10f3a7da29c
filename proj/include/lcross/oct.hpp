#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lcross/cost.hpp"
#include "lcross/curve_set.hpp"
#include "lcross/fgh.hpp"
#include "lcross/grid.hpp"
#include "lcross/hk/coherent.hpp"
#include "lcross/hk/hk.hpp"
#include "lcross/laser.hpp"
#include "lcross/split_operator.hpp"
#include "lcross/wavefunction.hpp"

namespace lcross {

// Monotone control iteration on a single driven surface,
//   H(t) = p^2/2m + V(r) - eps(t) mu(r),
// maximizing J = |<target|phi(T)>|^2 - alpha * integral eps^2 dt. Each
// iteration back-propagates the costate chi from the target and re-propagates
// phi forward while the field is rewritten node by node,
//   eps(t) = -(1/alpha) Im[ <phi|chi> <chi|mu|phi> ],
// with the freshly written node already in force for phi's next step.
// Backends share this driver: one works on the grid with the split-operator
// factors, the other on frozen-Gaussian ensembles with closed-form brackets.

struct ControlProblem {
  const CurveSet* cs = nullptr;  // one surface plus a {0,0} dipole
  Grid grid;                     // grid-backend resolution; also the FGH box
  PacketSpec psi0;               // initial Gaussian
  PacketSpec target;             // target Gaussian
  double horizon = 0.0;          // control window T
  double alpha = 0.01;           // fluence penalty
  double field_dt = 0.25;        // requested node spacing; adjusted to tile T
  double dt_hint = 0.25;         // propagator step; rounded to divide a node
  int curve_stride = 4;          // overlap-curve sampling, in field nodes

  void validate() const {
    if (!cs) throw std::invalid_argument("ControlProblem: no curve set");
    cs->validate();
    if (cs->n() != 1)
      throw std::invalid_argument("ControlProblem: control needs a single surface");
    if (!cs->has_dipole(0, 0))
      throw std::invalid_argument("ControlProblem: surface carries no dipole");
    if (!(alpha > 0.0)) throw std::invalid_argument("ControlProblem: alpha must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("ControlProblem: horizon must be > 0");
    if (!(field_dt > 0.0) || !(dt_hint > 0.0))
      throw std::invalid_argument("ControlProblem: field_dt and dt_hint must be > 0");
    if (grid.n < 8) throw std::invalid_argument("ControlProblem: grid too small");
    if (curve_stride < 1) throw std::invalid_argument("ControlProblem: curve_stride >= 1");
  }
};

// Uniform field nodes spanning [0, T] exactly; spacing is the nearest tiling
// of the horizon to the requested field_dt.
inline TabulatedField control_field_nodes(const ControlProblem& prob) {
  const auto n_seg = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(prob.horizon / prob.field_dt)));
  const double h = prob.horizon / static_cast<double>(n_seg);
  TabulatedField f;
  f.t.resize(n_seg + 1);
  f.eps.assign(n_seg + 1, 0.0);
  for (std::size_t k = 0; k <= n_seg; ++k) f.t[k] = h * static_cast<double>(k);
  f.t.back() = prob.horizon;
  return f;
}

// integral eps^2 dt, exact for the piecewise-linear tabulation.
inline double field_fluence(const TabulatedField& f) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < f.t.size(); ++k) {
    const double a = f.eps[k], b = f.eps[k + 1];
    acc += (f.t[k + 1] - f.t[k]) * (a * a + a * b + b * b) / 3.0;
  }
  return acc;
}

struct OctIterate {
  TabulatedField field;          // field written by this sweep
  double fidelity = 0.0;         // |<target|phi(T)>|^2
  double fluence = 0.0;
  double j = 0.0;                // fidelity - alpha * fluence
  std::int64_t pair_cost = 0;    // coherent-state pair evaluations consumed
  std::vector<cplx> bracket_ov;  // <phi|chi> at each node, for field replay
  std::vector<cplx> bracket_mu;  // <chi|mu|phi> at each node, for field replay
  std::vector<double> curve_t;   // overlap-curve sample times
  std::vector<double> curve;     // |<target|phi(t)>|^2 at those times
  bool monotone_break = false;   // set by run_oct when J drops beyond tolerance
};

// Propagation backend holding the working state phi and costate chi. The
// field reaches the steppers as a plain function of time so the driver can
// swap tabulations mid-sweep.
class OctBackend {
 public:
  using FieldFn = std::function<double(double)>;
  struct Bracket {
    cplx phi_chi;     // <phi|chi>
    cplx chi_mu_phi;  // <chi|mu|phi>
  };

  virtual ~OctBackend() = default;
  virtual void reset_phi() = 0;
  virtual void reset_chi(cplx weight) = 0;  // chi <- weight * target
  virtual void step_phi(double t, double dt, const FieldFn& eps) = 0;
  virtual void step_chi(double t, double dt, const FieldFn& eps) = 0;
  virtual Bracket bracket() const = 0;
  virtual cplx target_overlap_phi() const = 0;
  virtual cplx psi0_overlap_chi() const = 0;  // <psi0|chi>, read after the backward sweep
  // Fresh forward run from psi0 under the given field, leaving the working
  // state untouched; returns |<target|phi(T)>|^2. Thread-safe.
  virtual double forward_fidelity(const FieldFn& eps, double dt,
                                  std::size_t n_steps) const = 0;
};

// --- grid backend -------------------------------------------------------------

class QuantumOctBackend final : public OctBackend {
 public:
  explicit QuantumOctBackend(const ControlProblem& prob)
      : grid_(prob.grid),
        mass_(prob.cs->mass),
        psi0_(WaveFunction::gaussian(grid_, 1, 0, prob.psi0.center, prob.psi0.sigma,
                                     prob.psi0.p0)),
        target_(WaveFunction::gaussian(grid_, 1, 0, prob.target.center,
                                       prob.target.sigma, prob.target.p0)),
        phi_(psi0_),
        chi_(psi0_) {
    prob.validate();
    v_.resize(grid_.n);
    mu_.resize(grid_.n);
    const CurveSum& v = prob.cs->surfaces[0];
    const CurveSum& mu = prob.cs->dipoles.at({0, 0});
    for (std::size_t i = 0; i < grid_.n; ++i) {
      v_[i] = v.value(grid_.r(i));
      mu_[i] = mu.value(grid_.r(i));
    }
  }

  void reset_phi() override { phi_ = psi0_; }

  void reset_chi(cplx weight) override {
    chi_ = target_;
    for (auto& a : chi_.psi[0]) a *= weight;
  }

  void step_phi(double t, double dt, const FieldFn& eps) override {
    step_state(phi_, t, dt, eps);
  }
  void step_chi(double t, double dt, const FieldFn& eps) override {
    step_state(chi_, t, dt, eps);
  }

  Bracket bracket() const override {
    cplx pc(0.0, 0.0), cmp(0.0, 0.0);
    const auto& p = phi_.psi[0];
    const auto& c = chi_.psi[0];
    for (std::size_t i = 0; i < grid_.n; ++i) {
      pc += std::conj(p[i]) * c[i];
      cmp += std::conj(c[i]) * mu_[i] * p[i];
    }
    return {pc * grid_.dr, cmp * grid_.dr};
  }

  cplx target_overlap_phi() const override { return grid_inner(target_, phi_); }

  cplx psi0_overlap_chi() const override { return grid_inner(psi0_, chi_); }

  double forward_fidelity(const FieldFn& eps, double dt,
                          std::size_t n_steps) const override {
    WaveFunction w = psi0_;
    KineticStepper kin(grid_, mass_, dt);
    std::vector<cplx> table = phase_table(0.5 * dt);
    for (std::size_t s = 0; s < n_steps; ++s) {
      const double t_mid = (static_cast<double>(s) + 0.5) * dt;
      half_step(w, table, eps(t_mid), 0.5 * dt);
      kin.step(w);
      half_step(w, table, eps(t_mid), 0.5 * dt);
    }
    CostCounters::global().grid_steps += static_cast<std::int64_t>(n_steps);
    return std::norm(grid_inner(target_, w));
  }

 private:
  std::vector<cplx> phase_table(double tau) const {
    std::vector<cplx> ph(grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i)
      ph[i] = std::exp(cplx(0.0, -v_[i] * tau));
    return ph;
  }

  // exp(-i (v - e mu) tau) pointwise.
  void half_step(WaveFunction& w, const std::vector<cplx>& table, double e,
                 double tau) const {
    auto& p = w.psi[0];
    for (std::size_t i = 0; i < grid_.n; ++i) {
      const double ang = e * mu_[i] * tau;
      p[i] *= table[i] * cplx(std::cos(ang), std::sin(ang));
    }
  }

  void step_state(WaveFunction& w, double t, double dt, const FieldFn& eps) {
    if (!kin_ || dt != kin_dt_) {
      kin_.emplace(grid_, mass_, dt);
      kin_dt_ = dt;
      table_ = phase_table(0.5 * dt);
    }
    const double e = eps(t + 0.5 * dt);
    half_step(w, table_, e, 0.5 * dt);
    kin_->step(w);
    half_step(w, table_, e, 0.5 * dt);
    CostCounters::global().grid_steps += 1;
  }

  cplx grid_inner(const WaveFunction& bra, const WaveFunction& ket) const {
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < grid_.n; ++i)
      acc += std::conj(bra.psi[0][i]) * ket.psi[0][i];
    return acc * grid_.dr;
  }

  Grid grid_;
  double mass_;
  std::vector<double> v_, mu_;
  WaveFunction psi0_, target_, phi_, chi_;
  std::optional<KineticStepper> kin_;
  double kin_dt_ = 0.0;
  std::vector<cplx> table_;
};

// --- frozen-Gaussian backend ---------------------------------------------------

class SemiclassicalOctBackend final : public OctBackend {
 public:
  SemiclassicalOctBackend(const ControlProblem& prob, const HkParams& par)
      : prob_(&prob), par_(par) {
    prob.validate();
    HkEnsemble phi_src(prob.cs->mass, par, prob.psi0);
    HkParams chi_par = par;
    chi_par.seed = par.seed + 1;
    chi_par.gamma = phi_src.gamma();  // brackets need one shared width
    HkEnsemble chi_src(prob.cs->mass, chi_par, prob.target);
    gamma_ = phi_src.gamma();
    phi0_ = phi_src.trajectories();
    chi0_ = chi_src.trajectories();
    phi_ = phi0_;
    chi_ = chi0_;
    cx_ = StepContext{prob.cs->mass, gamma_, par.max_arg_jump, par.r_max};
    v_ = &prob.cs->surfaces[0];
    mu_ = &prob.cs->dipoles.at({0, 0});
    const double span = prob.grid.r_last() - prob.grid.r0;
    mu_tab_ = DipoleTable::build(*mu_, std::max(0.25 * prob.grid.r0, prob.grid.r0 - 0.5 * span),
                                 prob.grid.r_last() + 0.5 * span);
  }

  void reset_phi() override { phi_ = phi0_; }

  void reset_chi(cplx weight) override {
    chi_ = chi0_;
    for (auto& tr : chi_) tr.w *= weight;
  }

  void step_phi(double t, double dt, const FieldFn& eps) override {
    step_set(phi_, t, dt, eps);
  }
  void step_chi(double t, double dt, const FieldFn& eps) override {
    step_set(chi_, t, dt, eps);
  }

  Bracket bracket() const override {
    const CloudBracket cb =
        cloud_overlap_and_dipole(cloud_of(chi_), cloud_of(phi_), mu_tab_);
    return {std::conj(cb.overlap), cb.dipole};
  }

  cplx target_overlap_phi() const override {
    return packet_bra(cloud_of(phi_), prob_->target);
  }

  cplx psi0_overlap_chi() const override {
    return packet_bra(cloud_of(chi_), prob_->psi0);
  }

  double forward_fidelity(const FieldFn& eps, double dt,
                          std::size_t n_steps) const override {
    std::vector<HkTrajectory> w = phi0_;
    for (std::size_t s = 0; s < n_steps; ++s)
      step_set_on(w, static_cast<double>(s) * dt, dt, eps, cx_);
    return std::norm(packet_bra(cloud_of(w), prob_->target));
  }

 private:
  void step_set(std::vector<HkTrajectory>& set, double t, double dt,
                const FieldFn& eps) {
    step_set_on(set, t, dt, eps, cx_);
    for (auto& tr : set)
      if (tr.alive && tr.q < par_.r_min) tr.alive = false;
  }

  void step_set_on(std::vector<HkTrajectory>& set, double t, double dt,
                   const FieldFn& eps, const StepContext& cx) const {
    const CurveSum& v = *v_;
    const CurveSum& mu = *mu_;
    const SurfaceFunc surf = [&v, &mu, &eps](double r, double time) {
      PotPoint pv = v.eval(r);
      const PotPoint pm = mu.eval(r);
      const double e = eps(time);
      pv.v -= e * pm.v;
      pv.dv -= e * pm.dv;
      pv.d2v -= e * pm.d2v;
      return pv;
    };
    std::int64_t stepped = 0;
    for (auto& tr : set) {
      if (!tr.alive) continue;
      advance_trajectory(tr, surf, cx, t, dt);
      ++stepped;
    }
    CostCounters::global().traj_steps += stepped;
  }

  CoherentCloud cloud_of(const std::vector<HkTrajectory>& set) const {
    CoherentCloud c;
    c.gamma = gamma_;
    c.q.reserve(set.size());
    for (const auto& tr : set) {
      if (!tr.alive) continue;
      c.q.push_back(tr.q);
      c.p.push_back(tr.p);
      const cplx r = std::sqrt(std::abs(tr.r2)) * std::exp(cplx(0.0, 0.5 * tr.phase));
      c.coeff.push_back(tr.w * r * std::exp(cplx(0.0, tr.s)));
    }
    return c;
  }

  // <packet|cloud> via the closed-form overlaps.
  static cplx packet_bra(const CoherentCloud& c, const PacketSpec& packet) {
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j)
      acc += c.coeff[j] * std::conj(packet_overlap(c.gamma, c.q[j], c.p[j],
                                                   packet.center, packet.sigma,
                                                   packet.p0));
    CostCounters::global().pair_evals += static_cast<std::int64_t>(c.size());
    return acc;
  }

  const ControlProblem* prob_;
  HkParams par_;
  double gamma_ = 1.0;
  std::vector<HkTrajectory> phi0_, chi0_, phi_, chi_;
  StepContext cx_;
  const CurveSum* v_ = nullptr;
  const CurveSum* mu_ = nullptr;
  DipoleTable mu_tab_;
};

// --- the control sweep ----------------------------------------------------------

namespace detail {

inline std::size_t control_substeps(const ControlProblem& prob, double h) {
  return static_cast<std::size_t>(
      std::max<long long>(1, std::llround(std::ceil(h / prob.dt_hint - 1e-12))));
}

// Field reading used inside the control sweep: the node value holds until the
// next node is written. Keeping the incoming and outgoing fields on the same
// stepwise reading makes consecutive sweeps see identical dynamics for
// identical node values, which the monotonicity argument needs.
struct NodeHold {
  const std::vector<double>* eps = nullptr;
  double h = 1.0;
  double operator()(double t) const {
    const auto last = eps->size() - 2;  // last segment start
    const double raw = std::floor(t / h);
    const auto k = raw <= 0.0 ? std::size_t{0}
                              : std::min(static_cast<std::size_t>(raw), last);
    return (*eps)[k];
  }
};

// integral eps^2 dt for the stepwise-held reading.
inline double hold_fluence(const std::vector<double>& eps, double h) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < eps.size(); ++k) acc += h * eps[k] * eps[k];
  return acc;
}

}  // namespace detail

// One sweep: chi backward from the bare target under eps_in, then phi forward
// while the field is rewritten node by node, each fresh node already in
// force for phi's next step; chi retraces its own path under eps_in.
//
// Both brackets of the update are taken from the same phi/chi pair at the
// same instant. That matters for the ensemble backend: a common phase or
// normalization error of either state cancels between conj-linear and linear
// appearances in <phi|chi><chi|mu|phi>, and the r-independent part of mu
// drops out of the imaginary part identically, so the product is far less
// noisy than its factors. The target enters chi unweighted; the overlap
// weight the update needs is exactly what the first bracket evaluates to.
inline OctIterate zbr_iterate(const ControlProblem& prob, OctBackend& backend,
                              const TabulatedField& eps_in) {
  prob.validate();
  if (eps_in.t.size() < 2)
    throw std::invalid_argument("zbr_iterate: field needs at least two nodes");
  const std::int64_t pairs_before = CostCounters::global().pair_evals;

  OctIterate out;
  out.field = control_field_nodes(prob);
  const std::size_t n_nodes = out.field.t.size();
  const double h = out.field.t[1] - out.field.t[0];
  const std::size_t n_sub = detail::control_substeps(prob, h);
  const double dt = h / static_cast<double>(n_sub);

  // incoming field regularized onto the canonical nodes
  std::vector<double> in_nodes(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) in_nodes[k] = eps_in.lerp(out.field.t[k]);
  const OctBackend::FieldFn read_in = detail::NodeHold{&in_nodes, h};
  const OctBackend::FieldFn read_out = detail::NodeHold{&out.field.eps, h};

  // costate backward from the bare target
  backend.reset_chi(cplx(1.0, 0.0));
  for (std::size_t k = n_nodes - 1; k > 0; --k)
    for (std::size_t s = 0; s < n_sub; ++s)
      backend.step_chi(out.field.t[k] - static_cast<double>(s) * dt, -dt, read_in);

  // forward, rewriting each node as the sweep reaches it; every sample the
  // propagator draws on a segment comes after its node was written
  backend.reset_phi();
  out.bracket_ov.resize(n_nodes);
  out.bracket_mu.resize(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    const OctBackend::Bracket br = backend.bracket();
    out.bracket_ov[k] = br.phi_chi;
    out.bracket_mu[k] = br.chi_mu_phi;
    const double e = -std::imag(br.phi_chi * br.chi_mu_phi) / prob.alpha;
    if (!std::isfinite(e)) {
      std::ostringstream os;
      os << "zbr_iterate: non-finite field value at t = " << out.field.t[k];
      throw std::runtime_error(os.str());
    }
    out.field.eps[k] = e;
    if (k % static_cast<std::size_t>(prob.curve_stride) == 0 || k + 1 == n_nodes) {
      out.curve_t.push_back(out.field.t[k]);
      out.curve.push_back(std::norm(backend.target_overlap_phi()));
    }
    if (k + 1 == n_nodes) break;
    for (std::size_t s = 0; s < n_sub; ++s) {
      const double t = out.field.t[k] + static_cast<double>(s) * dt;
      backend.step_phi(t, dt, read_out);
      backend.step_chi(t, dt, read_in);
    }
  }

  out.fidelity = std::norm(backend.target_overlap_phi());
  out.fluence = detail::hold_fluence(out.field.eps, h);
  out.j = out.fidelity - prob.alpha * out.fluence;
  out.pair_cost = CostCounters::global().pair_evals - pairs_before;
  return out;
}

// Repeats the sweep until the functional gain falls below tol or max_iters is
// reached. A drop beyond 1e-9 marks the iterate (discretization too coarse
// for the scheme's monotonicity) but does not abort.
inline std::vector<OctIterate> run_oct(const ControlProblem& prob, OctBackend& backend,
                                       const TabulatedField& guess, int max_iters,
                                       double tol = 1e-7) {
  if (max_iters < 1) throw std::invalid_argument("run_oct: max_iters >= 1");
  std::vector<OctIterate> history;
  const TabulatedField* eps_in = &guess;
  for (int i = 0; i < max_iters; ++i) {
    OctIterate it = zbr_iterate(prob, backend, *eps_in);
    if (!history.empty()) {
      const double dj = it.j - history.back().j;
      if (dj < -1e-9) it.monotone_break = true;
      history.push_back(std::move(it));
      if (dj < tol) break;
    } else {
      history.push_back(std::move(it));
    }
    eps_in = &history.back().field;
  }
  return history;
}

// Weak resonant continuous wave at the fundamental vibrational gap of the
// control surface, the standard starting guess for vibrational steering.
inline TabulatedField resonant_guess(const ControlProblem& prob, double amplitude) {
  prob.validate();
  const CurveSum& v = prob.cs->surfaces[0];
  const Grid fgh_grid =
      Grid::from_range(prob.grid.r0, prob.grid.r_last(),
                       std::min<std::size_t>(prob.grid.n, 256));
  const FghResult levels = fgh_solve([&v](double r) { return v.value(r); },
                                     prob.cs->mass, fgh_grid, 2);
  if (levels.energies.size() < 2)
    throw std::runtime_error("resonant_guess: surface holds fewer than two levels");
  const double w01 = levels.energies[1] - levels.energies[0];
  TabulatedField f = control_field_nodes(prob);
  for (std::size_t k = 0; k < f.t.size(); ++k)
    f.eps[k] = amplitude * std::sin(w01 * f.t[k]);
  return f;
}

}  // namespace lcross
