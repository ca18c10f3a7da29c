#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lcross/models.hpp"
#include "lcross/zn/zn.hpp"

using namespace lcross;

TEST_CASE("reduced parameters reproduce the exponential survival identity") {
  // p = exp(-2 pi v12^2/(v df)) must equal exp(-pi/(4 a b)) with
  // a = sqrt(a2), b = sqrt(b2); algebraic identity, checked over a sweep.
  for (double v12 : {0.001, 0.005, 0.02}) {
    for (double f2 : {0.012, 0.03}) {
      for (double de : {0.002, 0.01, 0.05}) {
        const ZnInput in{v12, -0.02, f2, 918.0, -0.04};
        const double e = in.e_x + de;
        const double a = std::sqrt(zn_a2(in));
        const double b = std::sqrt(zn_b2(in, e));
        const double p_direct = lz_probability(in, e);
        const double p_reduced = std::exp(-M_PI / (4.0 * a * b));
        REQUIRE(p_direct == Catch::Approx(p_reduced).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("corrected survival approaches the plain exponential away from threshold") {
  const ZnInput in{0.004, 0.015, -0.02, 918.0, 0.0};
  // pick e with b^2 about 10: corrections should be sub-percent
  const double e = 10.0 * 2.0 * in.fgm() * in.v12 / in.df();
  const double ratio = zn_probability(in, e) / lz_probability(in, e);
  REQUIRE(ratio == Catch::Approx(1.0).margin(0.02));
  // at and below the crossing the survival is zero (adiabatic limit)
  REQUIRE(lz_probability(in, in.e_x) == 0.0);
  REQUIRE(zn_probability(in, in.e_x - 0.01) == 0.0);
}

TEST_CASE("transmission through an opposite-slope crossing has hard zeros") {
  for (double p : {0.1, 0.5, 0.9}) {
    // zero up to the floating-point resolution of cos at the half-integer
    REQUIRE(nt_transmission(p, 0.5 * M_PI) == Catch::Approx(0.0).margin(1e-28));
    REQUIRE(nt_transmission(p, 2.5 * M_PI) == Catch::Approx(0.0).margin(1e-25));
    const double peak = nt_transmission(p, 0.0);
    REQUIRE(peak == Catch::Approx(4.0 * (1.0 - p) / (4.0 * (1.0 - p) + p * p)));
    for (double psi = 0.0; psi < 3.0; psi += 0.37) {
      const double t = nt_transmission(p, psi);
      REQUIRE(t >= 0.0);
      REQUIRE(t <= 1.0);
    }
  }
  REQUIRE(nt_transmission(0.0, 1.0) == 0.0);
  REQUIRE(nt_transmission(1.0, 1.0) == 1.0);
}

TEST_CASE("well phase machinery is exact on a parallel-displaced pair") {
  // Two parallel curves with zero coupling: the upper adiabat IS the upper
  // parabola, so the phase integral has the closed form pi (e - vmin)/omega.
  const double mass = 918.0, omega = 0.012, r0 = 6.0, vmin = -0.05, gap = 0.02;
  CurveSet cs;
  cs.mass = mass;
  const double k = mass * omega * omega;
  cs.surfaces = {CurveSum{Harmonic{k, r0, vmin}}, CurveSum{Harmonic{k, r0, vmin - gap}}};
  cs.photons = {0, 0};
  DressedSet ds{&cs, 0.0, 0.0};
  TwoSurfaceAdiabats ad{&ds, 0, 1};

  const UpperWell well = locate_upper_well(ad, r0 - 3.0, r0 + 3.0);
  REQUIRE(well.r_min == Catch::Approx(r0).margin(1e-9));
  REQUIRE(well.e_min == Catch::Approx(vmin).margin(1e-12));

  for (double de : {0.003, 0.01, 0.02}) {
    const double psi = upper_well_phase(ad, mass, vmin + de, r0 - 3.0, r0 + 3.0);
    REQUIRE(psi == Catch::Approx(M_PI * de / omega).epsilon(1e-8));
  }

  // the closed form also fixes where the half-integer phases sit
  const auto stars = complete_reflection_energies(ad, mass, vmin + 1e-4, vmin + 0.02,
                                                  r0 - 3.0, r0 + 3.0);
  REQUIRE(!stars.empty());
  for (std::size_t n = 0; n < stars.size(); ++n)
    REQUIRE(stars[n] == Catch::Approx(vmin + (n + 0.5) * omega).margin(1e-8));
}

TEST_CASE("complete-reflection energies are self-consistent on a real crossing") {
  CurveSet cs = build_model("nt_pair");
  DressedSet ds{&cs, 0.0, 0.0};
  TwoSurfaceAdiabats ad{&ds, 0, 1};
  const UpperWell well = locate_upper_well(ad, 4.0, 12.0);
  REQUIRE(well.e_min == Catch::Approx(0.005).margin(1e-6));  // ec + vc at the crossing

  const double e_hi = 0.028;  // below both asymptotic plateaus (0.03)
  const auto stars = complete_reflection_energies(ad, cs.mass, well.e_min, e_hi, 4.0, 12.0);
  REQUIRE(stars.size() >= 2);
  for (std::size_t n = 0; n < stars.size(); ++n) {
    const double psi = upper_well_phase(ad, cs.mass, stars[n], 4.0, 12.0);
    REQUIRE(psi == Catch::Approx((n + 0.5) * M_PI).margin(1e-9));
    if (n) REQUIRE(stars[n] > stars[n - 1]);
  }
}
