#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "polebasis/evolution.hpp"

using namespace polebasis;

namespace {
const Pole kPole(1.0, 0.05);
}

TEST_CASE("branch evolution") {
  EvolvedBranch b = evolve_branch(CoherentLabel(2.0), kPole, 0.0);
  CHECK(b.survival == doctest::Approx(1.0));
  CHECK(std::abs(b.label.alpha - Complex(2.0, 0.0)) < 1e-15);

  double prev = 2.0;
  for (double t : {1.0, 5.0, 20.0, 80.0}) {
    EvolvedBranch bt = evolve_branch(CoherentLabel(2.0), kPole, t);
    double mag = std::abs(bt.label.alpha);
    CHECK(mag == doctest::Approx(2.0 * std::exp(-0.5 * kPole.gamma * t)));
    CHECK(mag < prev);
    prev = mag;
    CHECK(bt.survival > 0.0);
    CHECK(bt.survival <= 1.0);
    CHECK(bt.survival ==
          doctest::Approx(std::exp(-4.0 * (1.0 - std::exp(-kPole.gamma * t)))));
  }
  CHECK_THROWS_AS(evolve_branch(CoherentLabel(1.0), kPole, -0.5), Error);
}

TEST_CASE("amplitude") {
  SUBCASE("vacuum does not evolve") {
    std::vector<Complex> e0 = {1.0, 0.0, 0.0};
    CHECK(std::abs(amplitude(e0, e0, kPole, 17.0) - Complex(1.0, 0.0)) < 1e-15);
  }
  SUBCASE("single excited level") {
    std::vector<Complex> e1 = {0.0, 1.0, 0.0};
    double t = 3.0;
    Complex got = amplitude(e1, e1, kPole, t);
    Complex want = std::exp(Complex(-0.5 * kPole.gamma * t, -kPole.omega_prime * t));
    CHECK(std::abs(got - want) < 1e-15);
    CHECK(std::abs(std::abs(got) - std::exp(-0.5 * kPole.gamma * t)) < 1e-15);
  }
  SUBCASE("t = 0 is the plain inner product") {
    std::vector<Complex> a = {Complex(0.3, 0.1), Complex(0.0, -0.4), 0.5};
    std::vector<Complex> b = {0.2, Complex(0.7, 0.2), Complex(-0.1, 0.3)};
    Complex want = 0.0;
    for (int n = 0; n < 3; ++n) want += b[n] * std::conj(a[n]);
    CHECK(std::abs(amplitude(a, b, kPole, 0.0) - want) < 1e-15);
  }
  SUBCASE("precondition failures") {
    std::vector<Complex> a = {1.0, 0.0};
    std::vector<Complex> b = {1.0};
    CHECK_THROWS_AS(amplitude(a, b, kPole, 1.0), Error);
    CHECK_THROWS_AS(amplitude(a, a, kPole, -1.0), Error);
  }
  SUBCASE("self-amplitude envelope") {
    std::vector<Complex> a = {0.5, 0.5, 0.5, 0.5};
    for (double t : {0.0, 2.0, 10.0, 50.0}) {
      double env = 0.0;
      for (int n = 0; n < 4; ++n)
        env += std::norm(a[n]) * std::exp(-0.5 * n * kPole.gamma * t);
      CHECK(std::abs(amplitude(a, a, kPole, t)) <= env + 1e-12);
    }
    // Without oscillation the magnitude itself is monotone.
    Pole decay(0.0, 0.08);
    double prev = 1e9;
    for (double t : {0.0, 2.0, 10.0, 50.0}) {
      double mag = std::abs(amplitude(a, a, decay, t));
      CHECK(mag <= prev + 1e-12);
      prev = mag;
    }
  }
}

TEST_CASE("coherent overlap formulas") {
  SUBCASE("self overlap at t = 0") {
    CHECK(std::abs(coherent_overlap(CoherentLabel(1.3), CoherentLabel(1.3),
                                    kPole, 0.0) - Complex(1.0, 0.0)) < 1e-14);
  }
  SUBCASE("vacuum branch is time independent") {
    for (double t : {0.0, 1.0, 10.0, 100.0}) {
      Complex ov = coherent_overlap(CoherentLabel(0.0), CoherentLabel(2.0), kPole, t);
      CHECK(std::abs(ov - Complex(std::exp(-2.0), 0.0)) < 1e-14);
    }
  }
  SUBCASE("long-time limit") {
    Complex ov = coherent_overlap(CoherentLabel(2.0), CoherentLabel(2.0), kPole,
                                  2000.0 / kPole.gamma);
    CHECK(std::abs(ov - Complex(std::exp(-4.0), 0.0)) < 1e-12);
  }
  SUBCASE("magnitude bounded by one") {
    CHECK(std::abs(coherent_overlap(CoherentLabel(Complex(1.0, 2.0)),
                                    CoherentLabel(Complex(-0.7, 0.4)), kPole,
                                    3.0)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("offdiag factor") {
  CHECK(offdiag_factor(50.0, kPole, 0.0) == 1.0);
  double inf = offdiag_factor(50.0, kPole, 1e6 / kPole.gamma);
  CHECK(inf == doctest::Approx(std::exp(-50.0)).epsilon(1e-10));
  SUBCASE("short-time linearization within 1 percent") {
    double x = 4.0;
    double t = 0.01 / kPole.gamma;
    double lin = std::exp(-x * kPole.gamma * t);
    double full = offdiag_factor(x, kPole, t);
    CHECK(std::abs(full - lin) / full < 0.01);
  }
  CHECK_THROWS_AS(offdiag_factor(1.0, kPole, -1.0), Error);
  CHECK_THROWS_AS(offdiag_factor(-1.0, kPole, 1.0), Error);
}

TEST_CASE("equilibrium state is the vacuum projector") {
  DensityMatrix eq = equilibrium_state(FockSpace(4));
  CHECK(eq.entries(0, 0) == Complex(1.0, 0.0));
  CHECK(eq.entries.cwiseAbs().sum() == 1.0);
}

TEST_CASE("reduced state") {
  FockSpace space(64);
  Complex a(M_SQRT1_2, 0.0), b(M_SQRT1_2, 0.0);
  CoherentLabel a1(0.0), a2(3.0);

  SUBCASE("matches the static superposition at t = 0") {
    DensityMatrix evolved = reduced_state(a, b, a1, a2, kPole, 0.0, space);
    DensityMatrix direct = superposition_density(a, b, a1, a2, space);
    CHECK((evolved.entries - direct.entries).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("valid density matrix along the whole evolution") {
    for (double t : {0.1, 1.0, 10.0, 40.0, 200.0}) {
      DensityMatrix rho = reduced_state(a, b, a1, a2, kPole, t, space);
      CHECK(std::abs(rho.trace_real() - 1.0) < 1e-10);
    }
  }
  SUBCASE("long-time limit is the vacuum") {
    double t = 50.0 / kPole.gamma;
    DensityMatrix rho = reduced_state(a, b, a1, a2, kPole, t, space);
    CHECK(trace_distance(rho.entries, vacuum_projector(space)) < 1e-3);
    double t2 = 100.0 / kPole.gamma;
    DensityMatrix rho2 = reduced_state(a, b, a1, a2, kPole, t2, space);
    CHECK(trace_distance(rho2.entries, vacuum_projector(space)) < 1e-6);
  }
  SUBCASE("single coherent branch keeps its survival weight") {
    double t = 10.0;
    DensityMatrix rho = reduced_state(1.0, 0.0, a2, a1, kPole, t, space);
    EvolvedBranch br = evolve_branch(a2, kPole, t);
    Vector v = coherent_vector(br.label, space).components;
    Matrix want = br.survival * (v * v.adjoint());
    want(0, 0) += 1.0 - br.survival;
    CHECK((rho.entries - want).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("hbar rescales time") {
    DensityMatrix r1 = reduced_state(a, b, a1, a2, kPole, 3.0, space, 1.0);
    DensityMatrix r2 = reduced_state(a, b, a1, a2, kPole, 6.0, space, 2.0);
    CHECK((r1.entries - r2.entries).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK_THROWS_AS(reduced_state(0.0, 0.0, a1, a2, kPole, 0.0, space), Error);
  CHECK_THROWS_AS(reduced_state(a, b, a1, a2, kPole, -1.0, space), Error);
}

TEST_CASE("dyad weights close over the special cases") {
  CoherentLabel a1(0.0), a2(2.5);
  double x = a2.mag_sq();
  for (double t : {0.0, 1.0, 7.0, 30.0}) {
    DyadWeights w = dyad_weights(M_SQRT1_2, M_SQRT1_2, a1, a2, kPole, t);
    double u = 1.0 - std::exp(-kPole.gamma * t);
    CHECK(w.s1 == doctest::Approx(1.0));
    CHECK(w.s2 == doctest::Approx(std::exp(-x * u)).epsilon(1e-12));
    // Vacuum first branch: the cross factor equals offdiag_factor(|a2|^2).
    CHECK(w.w == doctest::Approx(offdiag_factor(x, kPole, t)).epsilon(1e-12));
    CHECK(w.w * w.w <= w.s1 * w.s2 * (1.0 + 1e-12));
    CHECK(w.vacuum >= -1e-12);
  }
  SUBCASE("coincident labels reduce to the branch survival") {
    DyadWeights w = dyad_weights(0.3, 0.7, a2, a2, kPole, 5.0);
    CHECK(w.w == doctest::Approx(w.s2).epsilon(1e-12));
  }
}
