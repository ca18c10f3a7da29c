#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "lcross/fgh.hpp"
#include "lcross/flux.hpp"
#include "lcross/models.hpp"
#include "lcross/scattering.hpp"
#include "lcross/split_operator.hpp"
#include "lcross/wavefunction.hpp"
#include "numerov_oracle.hpp"

using namespace lcross;

namespace {

CurveSet flat_pair(double v1, double v2) {
  CurveSet cs;
  cs.mass = 918.0;
  cs.surfaces = {CurveSum{ConstantCurve{v1}}, CurveSum{ConstantCurve{v2}}};
  cs.photons = {0, 1};
  cs.dipoles[{0, 1}] = CurveSum{ConstantCurve{1.0}};
  return cs;
}

}  // namespace

TEST_CASE("free gaussian spreads exactly as the closed form says") {
  const Grid g = Grid::from_range(0.0, 40.0, 1024);
  const double mass = 918.0, sigma = 0.5, k0 = 6.0, c0 = 10.0;
  CurveSet cs;
  cs.mass = mass;
  cs.surfaces = {CurveSum{ConstantCurve{0.0}}};
  cs.photons = {0};
  WaveFunction psi = WaveFunction::gaussian(g, 1, 0, c0, sigma, k0);
  auto pot = make_potential_stepper(cs, g, ZeroField{}, FieldMode::None);
  PropagateOptions opt;
  opt.dt = 2.0;
  opt.n_steps = 600;
  propagate(psi, *pot, opt);

  const double t = opt.dt * opt.n_steps;
  REQUIRE(psi.norm2() == Catch::Approx(1.0).margin(1e-12));
  const double mean = psi.moment_r(0, 1);
  const double var = psi.moment_r(0, 2) - mean * mean;
  const double var_exact =
      sigma * sigma + t * t / (4.0 * mass * mass * sigma * sigma);
  REQUIRE(mean == Catch::Approx(c0 + k0 / mass * t).epsilon(1e-9));
  REQUIRE(var == Catch::Approx(var_exact).epsilon(1e-8));
}

TEST_CASE("coherent state returns after one harmonic period") {
  const double mass = 1000.0, omega = 0.01, r0 = 2.0;
  const Grid g = Grid::from_range(-2.0, 6.0, 512);
  CurveSet cs = build_model("harmonic", {{"mass", mass}, {"omega", omega}, {"r0", r0}});
  const double sigma = 1.0 / std::sqrt(2.0 * mass * omega);
  WaveFunction psi0 = WaveFunction::gaussian(g, 1, 0, r0 + 0.5, sigma, 0.0);
  WaveFunction psi = psi0;
  auto pot = make_potential_stepper(cs, g, ZeroField{}, FieldMode::None);

  const double period = 2.0 * M_PI / omega;
  const int n_steps = 2000;
  PropagateOptions opt;
  opt.dt = period / n_steps;
  opt.n_steps = n_steps;

  const double e0 = total_energy(psi, *pot, 0.0, mass);
  propagate(psi, *pot, opt);
  const double e1 = total_energy(psi, *pot, 0.0, mass);

  REQUIRE(normalized_overlap(psi0, psi) > 0.999999);
  REQUIRE(std::fabs(psi.norm2() - 1.0) < 1e-12);
  REQUIRE(std::fabs(e1 - e0) < 1e-10);
}

TEST_CASE("norm and energy stay flat over long field-free runs") {
  const Grid g = Grid::from_range(0.5, 30.0, 1024);
  CurveSet cs = build_model("morse", {{"mass", 1224.0}});
  WaveFunction psi = WaveFunction::gaussian(g, 1, 0, 2.6, 0.25, 0.0);
  psi.normalize();
  auto pot = make_potential_stepper(cs, g, ZeroField{}, FieldMode::None);
  const double e0 = total_energy(psi, *pot, 0.0, cs.mass);
  PropagateOptions opt;
  opt.dt = 0.1;
  opt.n_steps = 2000;
  propagate(psi, *pot, opt);
  REQUIRE(std::fabs(psi.norm2() - 1.0) < 1e-12);
  // split-step energy error is oscillatory at O(dt^2), not secular
  REQUIRE(std::fabs(total_energy(psi, *pot, 0.0, cs.mass) - e0) < 1e-8);
}

TEST_CASE("grid eigensolver nails the harmonic ladder") {
  const double mass = 1000.0, omega = 0.01, r0 = 2.0;
  const Grid g = Grid::from_range(-2.0, 6.0, 256);
  auto v = [&](double r) { return 0.5 * mass * omega * omega * (r - r0) * (r - r0); };
  const FghResult f = fgh_solve(v, mass, g, 11);
  for (int n = 0; n <= 10; ++n)
    REQUIRE(f.energies[n] == Catch::Approx(omega * (n + 0.5)).margin(1e-9));

  // orthonormal under the Riemann inner product, leftmost lobe positive
  for (int a = 0; a < 11; ++a) {
    for (int b = a; b < 11; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < g.n; ++i) dot += f.states[a][i] * f.states[b][i];
      dot *= g.dr;
      REQUIRE(dot == Catch::Approx(a == b ? 1.0 : 0.0).margin(1e-10));
    }
    double peak = 0.0;
    std::size_t first = 0;
    for (std::size_t i = 0; i < g.n; ++i) peak = std::max(peak, std::fabs(f.states[a][i]));
    while (std::fabs(f.states[a][first]) < 0.35 * peak) ++first;
    REQUIRE(f.states[a][first] > 0.0);
  }

  REQUIRE_THROWS_AS(fgh_solve(v, mass, g, 10000), std::runtime_error);
}

TEST_CASE("grid eigensolver matches the closed-form anharmonic spectrum") {
  // exactly solvable well: depth d, levels -d + w0 (v + 1/2) - w0^2/(4d) (v + 1/2)^2
  const double d = 0.1026, a = 0.72, re = 2.0, mass = 1224.0;
  const Grid full = Grid::from_range(0.5, 30.0, 2048);
  const Grid sub{full.r0, full.dr, 512};
  const Morse m{d, a, re, 0.0};
  const FghResult f = fgh_solve([&](double r) { return m.value(r); }, mass, sub, 11);
  const double w0 = a * std::sqrt(2.0 * d / mass);
  for (int v = 0; v <= 10; ++v) {
    const double vh = v + 0.5;
    const double exact = -d + w0 * vh - w0 * w0 / (4.0 * d) * vh * vh;
    REQUIRE(f.energies[v] == Catch::Approx(exact).margin(1e-8));
  }

  // embedding into the propagation grid keeps the norm and the state
  WaveFunction w = embed_state(f, 3, full, 2, 0);
  REQUIRE(w.norm2() == Catch::Approx(1.0).margin(1e-10));
  REQUIRE(w.pop(1) == 0.0);

  // an embedded eigenstate is stationary under propagation
  CurveSet cs = build_model("morse", {{"mass", mass}});
  WaveFunction w1(full, 1);
  w1.psi[0] = w.psi[0];
  WaveFunction w1_0 = w1;
  auto pot = make_potential_stepper(cs, full, ZeroField{}, FieldMode::None);
  PropagateOptions opt;
  opt.dt = 0.1;
  opt.n_steps = 1000;
  propagate(w1, *pot, opt);
  const cplx ov = overlap(w1_0, w1);
  REQUIRE(std::abs(ov) > 1.0 - 1e-8);
  // accumulated phase encodes the level energy
  double phase = std::arg(ov);
  const double expected = -f.energies[3] * opt.dt * opt.n_steps;
  const double wrapped = std::remainder(phase - expected, 2.0 * M_PI);
  REQUIRE(std::fabs(wrapped) < 1e-6);
}

TEST_CASE("rotating-frame rabi flopping on flat surfaces") {
  const Grid g = Grid::from_range(0.0, 20.0, 256);
  CurveSet cs = flat_pair(0.0, 0.1);
  const double e0 = 0.01;  // half-Rabi 0.005 at resonance
  Field f = CwField{e0, 0.1, 0.0};
  WaveFunction psi = WaveFunction::gaussian(g, 2, 0, 10.0, 1.0, 0.0);
  auto pot = make_potential_stepper(cs, g, f, FieldMode::Rotating, 0.1);
  const double t_pi = M_PI / (2.0 * 0.005);
  PropagateOptions opt;
  opt.dt = t_pi / 400;
  opt.n_steps = 400;
  propagate(psi, *pot, opt);
  REQUIRE(psi.pop(1) == Catch::Approx(1.0).margin(1e-6));
  REQUIRE(psi.norm2() == Catch::Approx(1.0).margin(1e-12));

  // half the time gives an equal split
  WaveFunction psi2 = WaveFunction::gaussian(g, 2, 0, 10.0, 1.0, 0.0);
  opt.n_steps = 200;
  propagate(psi2, *pot, opt);
  REQUIRE(psi2.pop(1) == Catch::Approx(0.5).margin(1e-6));
}

TEST_CASE("two-surface closed form agrees with the general matrix stepper") {
  const Grid g = Grid::from_range(1.0, 15.0, 128);
  CurveSet cs = build_model("nt_pair", {{"rc", 8.0}});
  WaveFunction a = WaveFunction::gaussian(g, 2, 0, 10.0, 0.5, -4.0);
  WaveFunction b = a;
  TwoSurfaceStepper two(cs, g, ZeroField{}, FieldMode::None, 0.0);
  StaticMatrixStepper gen(cs, g, ZeroField{}, FieldMode::None, 0.0);
  PropagateOptions opt;
  opt.dt = 1.0;
  opt.n_steps = 300;
  propagate(a, two, opt);
  propagate(b, gen, opt);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t i = 0; i < g.n; ++i)
      REQUIRE(std::abs(a.psi[s][i] - b.psi[s][i]) < 1e-11);
}

TEST_CASE("absorbing strip removes an outgoing packet without reflection") {
  const Grid g = Grid::from_range(0.0, 40.0, 1024);
  CurveSet cs;
  cs.mass = 918.0;
  cs.surfaces = {CurveSum{ConstantCurve{0.0}}};
  cs.photons = {0};
  WaveFunction psi = WaveFunction::gaussian(g, 1, 0, 20.0, 0.6, 5.0);
  auto pot = make_potential_stepper(cs, g, ZeroField{}, FieldMode::None);
  Absorber cap;
  cap.right = CapRegion{30.0, 0.05, 3};
  FluxProbe back(g, 12.0, cs.mass, 1);
  PropagateOptions opt;
  opt.dt = 2.0;
  opt.n_steps = 4000;
  opt.absorber = &cap;
  opt.observer = [&](int step, double, WaveFunction& w) {
    if (step > 0) back.step(w, opt.dt);
  };
  propagate(psi, *pot, opt);
  // residual norm is the absorber's own reflection, ~1e-5 for this ramp
  REQUIRE(psi.norm2() < 1e-4);
  REQUIRE(std::fabs(back.total(0)) < 1e-4);
}

TEST_CASE("flux probe integrates to the crossing probability") {
  const Grid g = Grid::from_range(0.0, 40.0, 1024);
  CurveSet cs;
  cs.mass = 918.0;
  cs.surfaces = {CurveSum{ConstantCurve{0.0}}};
  cs.photons = {0};
  WaveFunction psi = WaveFunction::gaussian(g, 1, 0, 10.0, 0.5, 6.0);
  auto pot = make_potential_stepper(cs, g, ZeroField{}, FieldMode::None);
  Absorber cap;
  cap.right = CapRegion{32.0, 0.05, 3};
  FluxProbe probe(g, 20.0, cs.mass, 1);
  PropagateOptions opt;
  opt.dt = 1.0;
  opt.n_steps = 4000;
  opt.absorber = &cap;
  opt.observer = [&](int step, double, WaveFunction& w) {
    if (step > 0) probe.step(w, opt.dt);
  };
  propagate(psi, *pot, opt);
  // limited by the (k dr)^4 truncation of the current stencil
  REQUIRE(probe.total(0) == Catch::Approx(1.0).margin(5e-4));
}

TEST_CASE("energy-resolved transmission of a free packet is unity") {
  const Grid g = Grid::from_range(0.0, 40.0, 1024);
  const double mass = 918.0, sigma = 0.5, k0 = 6.0;
  CurveSet cs;
  cs.mass = mass;
  cs.surfaces = {CurveSum{ConstantCurve{0.0}}};
  cs.photons = {0};
  WaveFunction psi = WaveFunction::gaussian(g, 1, 0, 8.0, sigma, k0);
  auto pot = make_potential_stepper(cs, g, ZeroField{}, FieldMode::None);
  Absorber cap;
  cap.right = CapRegion{32.0, 0.05, 3};

  ScatteringSpec spec;
  spec.v_in = 0.0;
  spec.packet_sigma = sigma;
  spec.packet_k0 = k0;
  spec.surf_out = 0;
  spec.r_probe = 20.0;
  for (double k = 4.5; k <= 7.5; k += 0.25)
    spec.energies.push_back(k * k / (2.0 * mass));
  TransmissionAccumulator acc(g, mass, spec);

  PropagateOptions opt;
  opt.dt = 1.0;
  opt.n_steps = 8000;
  opt.absorber = &cap;
  opt.observer = [&](int step, double t, WaveFunction& w) {
    if (step > 0) acc.step(w, t, opt.dt);
  };
  propagate(psi, *pot, opt);
  for (double tr : acc.finalize()) REQUIRE(tr == Catch::Approx(1.0).margin(5e-3));
}

TEST_CASE("wavepacket transmission matches the stationary integrator") {
  const Grid g = Grid::from_range(0.0, 40.0, 2048);
  const double mass = 918.0, sigma = 0.35, k0 = 6.1;
  const GaussianBump barrier{0.02, 14.0, 1.0 / std::sqrt(2.0)};  // exp(-(r-14)^2)
  CurveSet cs;
  cs.mass = mass;
  cs.surfaces = {CurveSum{Curve{barrier}}};
  cs.photons = {0};
  WaveFunction psi = WaveFunction::gaussian(g, 1, 0, 7.0, sigma, k0);
  auto pot = make_potential_stepper(cs, g, ZeroField{}, FieldMode::None);
  Absorber cap;
  cap.right = CapRegion{33.0, 0.05, 3};
  cap.left = CapRegion{3.0, 0.05, 3};

  ScatteringSpec spec;
  spec.v_in = 0.0;
  spec.packet_sigma = sigma;
  spec.packet_k0 = k0;
  spec.surf_out = 0;
  spec.r_probe = 24.0;
  for (double e = 0.014; e <= 0.0301; e += 0.002) spec.energies.push_back(e);
  TransmissionAccumulator acc(g, mass, spec);

  PropagateOptions opt;
  opt.dt = 1.0;
  opt.n_steps = 9000;
  opt.absorber = &cap;
  opt.observer = [&](int step, double t, WaveFunction& w) {
    if (step > 0) acc.step(w, t, opt.dt);
  };
  propagate(psi, *pot, opt);

  const auto t_packet = acc.finalize();
  for (std::size_t e = 0; e < spec.energies.size(); ++e) {
    const double t_ref = numerov_transmission([&](double r) { return barrier.value(r); },
                                              mass, spec.energies[e], 2.0, 38.0, 14400);
    REQUIRE(t_packet[e] == Catch::Approx(t_ref).margin(0.01));
  }
}
