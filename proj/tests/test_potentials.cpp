#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lcross/constants.hpp"
#include "lcross/curves.hpp"
#include "lcross/dressed.hpp"
#include "lcross/laser.hpp"
#include "lcross/models.hpp"

using namespace lcross;

namespace {

// Central finite differences as the oracle for every analytic derivative.
template <class F>
double fd1(const F& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}
template <class F>
double fd2(const F& f, double x, double h = 1e-4) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

void check_curve_derivs(const Curve& c, double lo, double hi) {
  auto val = [&](double r) { return curve_value(c, r); };
  for (int k = 0; k <= 10; ++k) {
    const double r = lo + (hi - lo) * k / 10.0;
    REQUIRE(curve_deriv(c, r) == Catch::Approx(fd1(val, r)).margin(1e-6));
    REQUIRE(curve_second_deriv(c, r) == Catch::Approx(fd2(val, r)).margin(1e-5));
    // Fused evaluation must agree with the individual accessors to rounding.
    const PotPoint p = curve_eval(c, r);
    REQUIRE(p.v == Catch::Approx(curve_value(c, r)).margin(1e-14));
    REQUIRE(p.dv == Catch::Approx(curve_deriv(c, r)).margin(1e-14));
    REQUIRE(p.d2v == Catch::Approx(curve_second_deriv(c, r)).margin(1e-13));
  }
}

}  // namespace

TEST_CASE("curve primitives differentiate consistently") {
  check_curve_derivs(Morse{0.1026, 0.72, 2.0, 0.0}, 0.8, 10.0);
  check_curve_derivs(RepulsiveExp{0.9, 0.75, 0.01}, 0.8, 10.0);
  check_curve_derivs(Harmonic{0.09, 2.0, -0.1}, 0.5, 4.0);
  check_curve_derivs(LinearRamp{0.3, 1.0, -0.2}, 0.0, 5.0);
  check_curve_derivs(TanhStep{8.0, 1.3, 0.03, 0.0}, 4.0, 12.0);
  check_curve_derivs(GaussianBump{0.05, 4.0, 1.1}, 1.0, 8.0);

  const Morse m{0.1026, 0.72, 2.0, 0.0};
  REQUIRE(m.value(2.0) == Catch::Approx(-0.1026));
  REQUIRE(m.deriv(2.0) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(m.value(1e3) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("tabulated spline reproduces a smooth function") {
  std::vector<double> x, y;
  for (int i = 0; i <= 200; ++i) {
    x.push_back(0.0 + 3.0 * i / 200.0);
    y.push_back(std::sin(x.back()));
  }
  TabulatedCurve c(x, y);
  for (double r : {0.111, 0.77, 1.5, 2.43, 2.9}) {
    REQUIRE(c.value(r) == Catch::Approx(std::sin(r)).margin(1e-8));
    REQUIRE(c.deriv(r) == Catch::Approx(std::cos(r)).margin(1e-4));
  }
  for (std::size_t i = 0; i < x.size(); i += 17)
    REQUIRE(c.value(x[i]) == Catch::Approx(y[i]).margin(1e-14));
  // linear extrapolation outside the table
  REQUIRE(c.second_deriv(-0.5) == 0.0);
  REQUIRE(c.value(3.2) == Catch::Approx(c.value(3.0) + 0.2 * c.deriv(3.0)).margin(1e-12));

  check_curve_derivs(Curve{c}, 0.2, 2.8);
  check_curve_derivs(Curve{c}, -0.5, -0.1);  // extrapolation branch of eval()

  REQUIRE_THROWS_AS(TabulatedCurve({1.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(TabulatedCurve({1.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("model catalogue builds and rejects bad parameters") {
  for (const auto& fam : model_families()) {
    CurveSet cs = build_model(fam.name);
    REQUIRE(cs.n() == fam.n_surfaces);
    REQUIRE(cs.mass > 0.0);
  }
  REQUIRE_THROWS_AS(build_model("no_such_model"), std::invalid_argument);
  REQUIRE_THROWS_AS(build_model("morse", {{"bogus", 1.0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(build_model("morse", {{"mass", -5.0}}), std::invalid_argument);
}

TEST_CASE("dressed two-surface system: crossing location and adiabats") {
  CurveSet cs = build_model("h2p_like");
  const double omega = units::nm_to_hartree(515.0);
  const double e0 = 0.007;
  DressedSet ds{&cs, omega, e0};

  auto crossings = find_crossings(ds, 1.0, 15.0);
  REQUIRE(crossings.size() == 1);
  const CrossingPoint& cp = crossings[0];
  REQUIRE(cp.i == 0);
  REQUIRE(cp.j == 1);
  REQUIRE(cp.r_x == Catch::Approx(4.0).margin(0.01));
  REQUIRE(cp.e_x == Catch::Approx(cs.v(0, cp.r_x)).margin(1e-12));
  REQUIRE(cp.f_i > 0.0);   // bound surface rising past its minimum
  REQUIRE(cp.f_j < 0.0);   // repulsive surface falling
  REQUIRE(cp.v12 == Catch::Approx(0.5 * e0 * cs.dipole(0, 1, cp.r_x)).margin(1e-15));

  TwoSurfaceAdiabats ad{&ds, 0, 1};
  for (double r : {2.5, 3.5, cp.r_x, 4.5, 6.0}) {
    const SymEig eig = ds.adiabats(r);
    REQUIRE(ad.lower(r) == Catch::Approx(eig.values[0]).margin(1e-12));
    REQUIRE(ad.upper(r) == Catch::Approx(eig.values[1]).margin(1e-12));
    auto up = [&](double rr) { return ad.upper(rr); };
    auto lo = [&](double rr) { return ad.lower(rr); };
    REQUIRE(ad.upper_deriv(r) == Catch::Approx(fd1(up, r)).margin(1e-6));
    REQUIRE(ad.lower_deriv(r) == Catch::Approx(fd1(lo, r)).margin(1e-6));
    REQUIRE(ad.upper_second_deriv(r) == Catch::Approx(fd2(up, r)).margin(1e-5));
    REQUIRE(ad.lower_second_deriv(r) == Catch::Approx(fd2(lo, r)).margin(1e-5));
  }
  // adiabatic gap at the crossing is twice the coupling
  REQUIRE(ad.upper(cp.r_x) - ad.lower(cp.r_x) == Catch::Approx(2.0 * cp.v12).epsilon(1e-10));
}

TEST_CASE("static-coupling pair dresses independently of the field") {
  CurveSet cs = build_model("nt_pair", {{"vc", 0.004}, {"rc", 8.0}});
  DressedSet ds{&cs, 0.0, 0.0};
  auto crossings = find_crossings(ds, 2.0, 14.0);
  REQUIRE(crossings.size() == 1);
  REQUIRE(crossings[0].r_x == Catch::Approx(8.0).margin(1e-9));
  REQUIRE(crossings[0].v12 == Catch::Approx(0.004).margin(1e-12));
  REQUIRE(crossings[0].f_i < 0.0);
  REQUIRE(crossings[0].f_j > 0.0);

  // field strength must not change a static coupling
  DressedSet ds2{&cs, 0.1, 0.5};
  REQUIRE(ds2.offdiag(0, 1, 8.0) == Catch::Approx(0.004).margin(1e-15));
}

TEST_CASE("field shapes: values, envelopes, tabulated interpolation") {
  const GaussianPulse g{0.01, 0.06, 500.0, 200.0, 0.0};
  REQUIRE(g.envelope(500.0) == Catch::Approx(0.01));
  REQUIRE(g.envelope(600.0) == Catch::Approx(0.005).epsilon(1e-12));  // half width at half max
  Field f = g;
  REQUIRE(field_value(f, 500.0) == Catch::Approx(0.01));
  REQUIRE(field_carrier(f) == Catch::Approx(0.06));

  Field cw = CwField{0.02, 0.1, 0.0};
  REQUIRE(field_envelope(cw, 123.0) == Catch::Approx(0.02));
  REQUIRE(field_value(cw, 0.0) == Catch::Approx(0.02));

  TabulatedField tab;
  tab.t = {0.0, 1.0, 2.0};
  tab.eps = {0.0, 1.0, 0.0};
  Field ft = tab;
  REQUIRE(field_value(ft, 0.5) == Catch::Approx(0.5));
  REQUIRE(field_value(ft, 1.5) == Catch::Approx(0.5));
  REQUIRE(field_value(ft, -1.0) == Catch::Approx(0.0));
  REQUIRE(field_value(ft, 5.0) == Catch::Approx(0.0));
}
