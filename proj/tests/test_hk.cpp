#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "lcross/hk/coherent.hpp"
#include "lcross/hk/hk.hpp"
#include "lcross/models.hpp"
#include "lcross/split_operator.hpp"
#include "lcross/wavefunction.hpp"

using namespace lcross;

namespace {

// Dense Riemann oracle for <f|h> and <f|x|h> on [-L, L].
template <class F, class H>
cplx riemann(F&& f, H&& h, double lo, double hi, int n = 400000, int x_power = 0) {
  const double dx = (hi - lo) / n;
  cplx acc(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    const double x = lo + (i + 0.5) * dx;
    acc += std::conj(f(x)) * std::pow(x, x_power) * h(x);
  }
  return acc * dx;
}

double det_m(const HkTrajectory& t) { return t.mqq * t.mpp - t.mqp * t.mpq; }

}  // namespace

TEST_CASE("coherent-state matrix elements match quadrature") {
  const double g = 1.3;
  const double q1 = 0.4, p1 = -0.7, q2 = 1.1, p2 = 0.9;
  auto g1 = [&](double x) { return frozen_gaussian(g, q1, p1, x); };
  auto g2 = [&](double x) { return frozen_gaussian(g, q2, p2, x); };

  const cplx ov = pair_overlap(g, q1, p1, q2, p2);
  REQUIRE(std::abs(ov - riemann(g1, g2, -20.0, 20.0)) < 1e-10);
  // swapping bra and ket conjugates, and the diagonal is unit norm
  REQUIRE(std::abs(pair_overlap(g, q2, p2, q1, p1) - std::conj(ov)) < 1e-15);
  REQUIRE(std::abs(pair_overlap(g, q1, p1, q1, p1) - 1.0) < 1e-15);

  const cplx xel = pair_center(g, q1, p1, q2, p2) * ov;
  REQUIRE(std::abs(xel - riemann(g1, g2, -20.0, 20.0, 400000, 1)) < 1e-10);

  const double c = -0.3, sigma = 0.8, pbar = 0.5;
  auto psi0 = [&](double x) {
    const double d = x - c;
    return std::pow(2.0 * M_PI * sigma * sigma, -0.25) *
           std::exp(cplx(-d * d / (4.0 * sigma * sigma), pbar * d));
  };
  const cplx pov = packet_overlap(g, q1, p1, c, sigma, pbar);
  REQUIRE(std::abs(pov - riemann(g1, psi0, -25.0, 25.0)) < 1e-10);

  // Husimi marginals: |<g|psi0>|^2 falls off with the advertised variances.
  const double vq = husimi_var_q(g, sigma), vp = husimi_var_p(g, sigma);
  const double ratio_q = std::norm(packet_overlap(g, c + 1.0, pbar, c, sigma, pbar)) /
                         std::norm(packet_overlap(g, c, pbar, c, sigma, pbar));
  REQUIRE(std::log(ratio_q) == Catch::Approx(-0.5 / vq).epsilon(1e-12));
  const double ratio_p = std::norm(packet_overlap(g, c, pbar + 1.0, c, sigma, pbar)) /
                         std::norm(packet_overlap(g, c, pbar, c, sigma, pbar));
  REQUIRE(std::log(ratio_p) == Catch::Approx(-0.5 / vp).epsilon(1e-12));
}

TEST_CASE("cloud reconstruction and brackets agree with direct sums") {
  const double g = 6.0;
  CoherentCloud a;
  a.gamma = g;
  a.q = {2.0, 2.6};
  a.p = {1.0, -2.0};
  a.coeff = {cplx(0.7, 0.2), cplx(-0.1, 0.4)};
  CoherentCloud b;
  b.gamma = g;
  b.q = {2.3};
  b.p = {0.5};
  b.coeff = {cplx(0.9, -0.3)};

  const Grid grid = Grid::from_range(-2.0, 7.0, 2048);
  const std::vector<cplx> pa = cloud_on_grid(a, grid);
  for (std::size_t i : {int(100), int(900), int(1200)}) {
    const double x = grid.r(i);
    cplx direct(0.0, 0.0);
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double d = std::abs(x - a.q[j]);
      if (d <= 6.0 * frozen_width(g)) direct += a.coeff[j] * frozen_gaussian(g, a.q[j], a.p[j], x);
    }
    REQUIRE(std::abs(pa[i] - direct) < 1e-14);
  }
  // far outside every window the reconstruction is exactly zero
  REQUIRE(pa[0] == cplx(0.0, 0.0));

  // <a|b> from the pair formula vs the dense grids
  const std::vector<cplx> pb = cloud_on_grid(b, grid, 40.0);
  const std::vector<cplx> pa_wide = cloud_on_grid(a, grid, 40.0);
  cplx grid_ov(0.0, 0.0);
  for (std::size_t i = 0; i < grid.n; ++i) grid_ov += std::conj(pa_wide[i]) * pb[i];
  grid_ov *= grid.dr;
  REQUIRE(std::abs(cloud_overlap(a, b) - grid_ov) < 1e-12);
  REQUIRE(std::abs(grid_cloud_overlap(pa_wide, grid, b, 40.0) - grid_ov) < 1e-12);

  // bracket pair: overlap plus a linearized dipole, against explicit sums
  CurveSum mu;
  mu.terms.push_back(LinearRamp{0.31, 0.0, 0.12});
  const CloudBracket br = cloud_overlap_and_dipole(a, b, mu);
  REQUIRE(std::abs(br.overlap - grid_ov) < 1e-12);
  cplx want(0.0, 0.0);
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t k = 0; k < b.size(); ++k) {
      const cplx ov = pair_overlap(g, a.q[j], a.p[j], b.q[k], b.p[k]);
      const cplx zc = pair_center(g, a.q[j], a.p[j], b.q[k], b.p[k]);
      const double xm = 0.5 * (a.q[j] + b.q[k]);
      want += std::conj(a.coeff[j]) * b.coeff[k] * ov *
              (mu.value(xm) + mu.deriv(xm) * (zc - xm));
    }
  REQUIRE(std::abs(br.dipole - want) < 1e-13);
  // a linear dipole is represented exactly, so the grid sum must agree too
  cplx grid_mu(0.0, 0.0);
  for (std::size_t i = 0; i < grid.n; ++i)
    grid_mu += std::conj(pa_wide[i]) * mu.value(grid.r(i)) * pb[i];
  grid_mu *= grid.dr;
  REQUIRE(std::abs(br.dipole - grid_mu) < 1e-11);

  CoherentCloud other = b;
  other.gamma = 2.0 * g;
  REQUIRE_THROWS_AS(cloud_overlap(a, other), std::invalid_argument);
}

TEST_CASE("free trajectory carries the analytic prefactor and action") {
  const double m = 1.7, g = 0.9;
  HkParams par;
  par.gamma = g;
  std::vector<HkTrajectory> one(1);
  one[0].q = 0.3;
  one[0].p = 1.1;
  one[0].w = cplx(1.0, 0.0);
  HkEnsemble ens(m, par, std::move(one));
  CurveSum flat;
  flat.terms.push_back(ConstantCurve{0.0});
  const SurfaceFunc surf = make_surface(flat);
  const double dt = 0.01;
  ens.step_many(surf, dt, 500);
  const double t = 500 * dt;
  const auto& tr = ens.trajectories()[0];
  REQUIRE(tr.q == Catch::Approx(0.3 + 1.1 * t / m).epsilon(1e-12));
  REQUIRE(tr.s == Catch::Approx(1.1 * 1.1 * t / (2.0 * m)).epsilon(1e-12));
  // R^2 = 1 - i gamma t / (2 m), free-particle monodromy by hand
  REQUIRE(std::abs(tr.r2 - cplx(1.0, -g * t / (2.0 * m))) < 1e-12);
  REQUIRE(det_m(tr) == Catch::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("harmonic prefactor is unimodular and unwraps across branch cuts") {
  const double m = 1.0, w = 1.0, g = m * w;  // width-matched: R = e^{-i w t / 2}
  HkParams par;
  par.gamma = g;
  std::vector<HkTrajectory> one(1);
  one[0].q = 1.4;
  one[0].w = cplx(1.0, 0.0);
  HkEnsemble ens(m, par, std::move(one));
  CurveSum pot;
  pot.terms.push_back(Harmonic{m * w * w, 0.0, 0.0});
  const SurfaceFunc surf = make_surface(pot);
  const double period = 2.0 * M_PI / w;
  const std::size_t steps = 8192;
  const double dt = 3.0 * period / steps;
  for (std::size_t i = 0; i < steps; ++i) {
    ens.step(surf, dt);
    REQUIRE(std::abs(std::abs(ens.trajectories()[0].r2) - 1.0) < 1e-5);
  }
  const auto& tr = ens.trajectories()[0];
  // after three periods the unwrapped phase reaches -6 pi, so R = e^{-3 pi i} = -1;
  // a principal-branch square root would return +1 here
  REQUIRE(tr.phase == Catch::Approx(-6.0 * M_PI).margin(1e-4));
  const cplx r = std::sqrt(std::abs(tr.r2)) * std::exp(cplx(0.0, 0.5 * tr.phase));
  REQUIRE(std::abs(r - cplx(-1.0, 0.0)) < 1e-4);
  REQUIRE(det_m(tr) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("prefactor phase jump beyond the limit aborts the run") {
  HkParams par;
  par.gamma = 1.0;
  std::vector<HkTrajectory> one(1);
  one[0].q = 0.5;
  one[0].w = cplx(1.0, 0.0);
  HkEnsemble ens(1.0, par, std::move(one));
  CurveSum pot;
  pot.terms.push_back(Harmonic{1.0, 0.0, 0.0});
  const SurfaceFunc surf = make_surface(pot);
  REQUIRE_THROWS_AS(ens.step(surf, 2.5), std::runtime_error);
}

TEST_CASE("harmonic ensemble returns to the initial packet after one period") {
  // Width-matched Gaussians in a harmonic well evolve rigidly, so every
  // sampled trajectory contributes exactly 1/N to the one-period overlap and
  // the Monte Carlo variance vanishes; small N suffices. The overall sign is
  // the half-quantum phase e^{-i w T / 2} = -1.
  const double m = 1.0, w = 1.0;
  PacketSpec packet{1.5, std::sqrt(0.5 / (m * w)), 0.0};  // gamma defaults to m w
  HkParams par;
  par.n_traj = 64;
  par.seed = 7;
  HkEnsemble ens(m, par, packet);
  REQUIRE(ens.gamma() == Catch::Approx(m * w).epsilon(1e-14));
  CurveSum pot;
  pot.terms.push_back(Harmonic{m * w * w, 0.0, 0.0});
  const SurfaceFunc surf = make_surface(pot);
  const std::size_t steps = 4096;
  const double dt = 2.0 * M_PI / w / steps;
  ens.step_many(surf, dt, steps);
  const cplx ov = ens.overlap_with_packet(packet);
  REQUIRE(std::abs(ov - cplx(-1.0, 0.0)) < 5e-5);
}

TEST_CASE("ensemble matches grid propagation on a Morse well") {
  const CurveSet cs = build_model("hd_plus_like");
  const double mass = cs.mass;
  const PacketSpec packet{2.2, 0.15, 0.0};

  // reference: split-operator propagation of the same packet
  const Grid grid = Grid::from_range(0.5, 30.0, 1024);
  WaveFunction psi = WaveFunction::gaussian(grid, 1, 0, packet.center, packet.sigma, packet.p0);
  auto stepper = make_potential_stepper(cs, grid, Field{ZeroField{}}, FieldMode::None);
  PropagateOptions opt;
  opt.dt = 0.5;
  opt.n_steps = 800;
  propagate(psi, *stepper, opt);

  HkParams par;
  par.n_traj = 30000;
  par.seed = 42;
  HkEnsemble ens(mass, par, packet);
  const SurfaceFunc surf = make_surface(cs.surfaces[0]);
  ens.step_many(surf, 1.0, 400);
  REQUIRE(ens.n_escaped() == 0);

  const std::vector<cplx> rec = cloud_on_grid(ens.cloud(), grid);
  cplx ov(0.0, 0.0);
  double n2 = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    ov += std::conj(psi.psi[0][i]) * rec[i];
    n2 += std::norm(rec[i]);
  }
  ov *= grid.dr;
  n2 *= grid.dr;
  // Semiclassical vs exact: direction of the state to 1%, phase to 0.02 rad.
  // The raw ensemble norm drifts a few percent on an anharmonic well; that
  // drift is part of the approximation, not an implementation artifact.
  REQUIRE(std::abs(ov) / std::sqrt(n2) > 0.99);
  REQUIRE(std::abs(std::arg(ov)) < 0.02);
  REQUIRE(n2 == Catch::Approx(1.0).margin(0.08));
}

TEST_CASE("ensemble propagation is reproducible and field coupling is literal") {
  const CurveSet cs = build_model("hd_plus_like");
  PacketSpec packet{2.1, 0.2, 0.0};
  HkParams par;
  par.n_traj = 40;
  par.seed = 5;

  Field field{CwField{0.01, 0.05, 0.0}};
  const SurfaceFunc surf = make_driven_surface(cs.surfaces[0], cs.dipoles.at({0, 0}), field);
  // driven surface is V - eps(t) mu pointwise
  const double r = 2.4, t = 37.0;
  const PotPoint driven = surf(r, t);
  const double eps = field_value(field, t);
  REQUIRE(driven.v == Catch::Approx(cs.v(0, r) - eps * cs.dipole(0, 0, r)).epsilon(1e-14));
  REQUIRE(driven.dv ==
          Catch::Approx(cs.dv(0, r) - eps * curve_deriv(cs.dipoles.at({0, 0}).terms[0], r))
              .epsilon(1e-14));

  HkEnsemble a(cs.mass, par, packet);
  HkEnsemble b(cs.mass, par, packet);
  a.step_many(surf, 0.5, 200);
  b.step_many(surf, 0.5, 200);
  const CoherentCloud ca = a.cloud(), cb = b.cloud();
  REQUIRE(ca.size() == cb.size());
  for (std::size_t j = 0; j < ca.size(); ++j) {
    REQUIRE(ca.q[j] == cb.q[j]);
    REQUIRE(ca.p[j] == cb.p[j]);
    REQUIRE(ca.coeff[j] == cb.coeff[j]);
  }

  HkParams par2 = par;
  par2.seed = 6;
  HkEnsemble c(cs.mass, par2, packet);
  c.step_many(surf, 0.5, 200);
  REQUIRE(c.cloud().q[0] != ca.q[0]);
}

TEST_CASE("trajectories leaving through the inner edge are dropped and counted") {
  HkParams par;
  par.gamma = 4.0;
  par.r_min = 1.0;
  std::vector<HkTrajectory> two(2);
  two[0].q = 2.0;
  two[0].p = -3.0;  // heads inward, passes r_min
  two[0].w = cplx(0.5, 0.0);
  two[1].q = 2.0;
  two[1].p = +3.0;
  two[1].w = cplx(0.5, 0.0);
  HkEnsemble ens(1.0, par, std::move(two));
  CurveSum flat;
  flat.terms.push_back(ConstantCurve{0.0});
  ens.step_many(make_surface(flat), 0.05, 20);
  REQUIRE(ens.n_escaped() == 1);
  REQUIRE(ens.cloud().size() == 1);
  REQUIRE(ens.cloud().q[0] > 2.0);
}

TEST_CASE("outer freeze keeps dissociating trajectories ballistic") {
  // Steep downhill ramp beyond r_max must not accelerate the frozen branch.
  HkParams par;
  par.gamma = 1.0;
  par.r_max = 3.0;
  std::vector<HkTrajectory> one(1);
  one[0].q = 3.1;
  one[0].p = 2.0;
  one[0].w = cplx(1.0, 0.0);
  HkEnsemble ens(1.0, par, std::move(one));
  CurveSum ramp;
  ramp.terms.push_back(LinearRamp{-5.0, 3.0, 0.0});
  const std::size_t n = 400;
  const double dt = 0.01;
  ens.step_many(make_surface(ramp), dt, n);
  const auto& tr = ens.trajectories()[0];
  // in the frozen region the motion is exactly ballistic and the monodromy a shear
  REQUIRE(tr.p == 2.0);
  REQUIRE(tr.q == Catch::Approx(3.1 + 2.0 * n * dt).epsilon(1e-13));
  REQUIRE(tr.mpq == 0.0);
  REQUIRE(tr.mqp == Catch::Approx(n * dt / 1.0).epsilon(1e-13));
  REQUIRE(det_m(tr) == Catch::Approx(1.0).epsilon(1e-12));
}

