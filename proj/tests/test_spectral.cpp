#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>

#include "doctest.h"
#include "polebasis/spectral.hpp"

using namespace polebasis;

namespace {

// Brute-force principal-value oracle: symmetric excision with Simpson panels
// and a linear-in-delta Richardson step. Independent of the production
// singularity-subtraction path.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double pv_oracle(const SpectralDensity& j, double omega, int subdiv) {
  const double lo = j.support_min();
  const double hi = j.support_max(omega);
  auto f = [&](double w) { return j(w) / (omega - w); };
  auto excised = [&](double d) {
    return simpson(f, lo, omega - d, subdiv) + simpson(f, omega + d, hi, subdiv);
  };
  // d must stay well above the Simpson step so the edge layer is resolved;
  // two Richardson levels remove the d and d^3 excision terms.
  double d = 5e-2 * std::min(omega - lo, hi - omega);
  double r1 = 2.0 * excised(0.5 * d) - excised(d);
  double r2 = 2.0 * excised(0.25 * d) - excised(0.5 * d);
  return (8.0 * r2 - r1) / 7.0;
}

SpectralDensity ohmic_dense_sampled(double eta, double cutoff, double hull,
                                    int points) {
  SpectralDensity ref = SpectralDensity::ohmic(eta, cutoff);
  std::vector<double> grid, vals;
  for (int i = 0; i < points; ++i) {
    double w = hull * double(i) / (points - 1);
    grid.push_back(w);
    vals.push_back(ref(w));
  }
  return SpectralDensity::tabulated(grid, vals);
}

SpectralDensity ohmic_sampled(double eta, double cutoff, double omega,
                              int points) {
  SpectralDensity ref = SpectralDensity::ohmic(eta, cutoff);
  double hi = ref.support_max(omega);
  std::vector<double> grid, vals;
  for (int i = 0; i < points; ++i) {
    double w = hi * double(i) / (points - 1);
    grid.push_back(w);
    vals.push_back(ref(w));
  }
  return SpectralDensity::tabulated(grid, vals);
}

}  // namespace

TEST_CASE("ohmic evaluation") {
  SpectralDensity j = SpectralDensity::ohmic(0.01, 10.0);
  CHECK(j(1.0) == doctest::Approx(9.0484e-3).epsilon(1e-4));
  CHECK(j(1.0) == 0.01 * std::exp(-0.1));
  CHECK(j(0.0) == 0.0);
  CHECK_THROWS_AS(j(-1.0), Error);
}

TEST_CASE("tabulated density validation and interpolation") {
  SUBCASE("too few points") {
    CHECK_THROWS_AS(SpectralDensity::tabulated({0, 1, 2}, {0, 1, 0}), Error);
  }
  SUBCASE("non-monotone grid") {
    std::vector<double> g = {0, 1, 2, 3, 3, 5, 6, 7};
    std::vector<double> v(8, 1.0);
    CHECK_THROWS_AS(SpectralDensity::tabulated(g, v), Error);
  }
  SUBCASE("matches the parametric twin within 1e-6") {
    SpectralDensity tab = ohmic_dense_sampled(0.01, 10.0, 12.0, 200);
    SpectralDensity ref = SpectralDensity::ohmic(0.01, 10.0);
    for (double w : {0.25, 1.0, 3.7, 9.0, 11.5})
      CHECK(std::abs(evaluate_density(tab, w) - ref(w)) < 1e-6);
  }
  SUBCASE("out-of-hull query") {
    SpectralDensity tab = ohmic_sampled(0.01, 10.0, 1.0, 64);
    CHECK_THROWS_AS(tab(1e6), Error);
  }
  SUBCASE("interpolation stays non-negative") {
    // Sharp corner in the data tempts a cubic undershoot.
    std::vector<double> g = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> v = {0, 0, 0, 0, 1, 0, 0, 0, 0};
    SpectralDensity tab = SpectralDensity::tabulated(g, v);
    for (double w = 0.0; w <= 8.0; w += 0.01) CHECK(tab(w) >= 0.0);
  }
}

TEST_CASE("self-energy width is pi J(omega)") {
  SpectralDensity j = SpectralDensity::ohmic(0.01, 10.0);
  SelfEnergy se = self_energy(j, 1.0);
  double closed = M_PI * 0.01 * std::exp(-0.1);
  CHECK(std::abs(se.width_part - closed) <= 1e-12 * closed);
  CHECK(se.width_part == doctest::Approx(2.8425e-2).epsilon(1e-4));
}

TEST_CASE("flat density has vanishing shift at the center") {
  std::vector<double> grid, vals;
  for (int i = 0; i < 33; ++i) {
    grid.push_back(2.0 * i / 32.0);
    vals.push_back(0.05);
  }
  SpectralDensity flat = SpectralDensity::tabulated(grid, vals);
  SelfEnergy se = self_energy(flat, 1.0);
  CHECK(std::abs(se.shift) < 1e-12);
}

TEST_CASE("PV shift matches the excision oracle") {
  for (double omega : {0.5, 1.0}) {
    SpectralDensity j = SpectralDensity::ohmic(0.01, 10.0);
    SelfEnergy se = self_energy(j, omega);
    double oracle = pv_oracle(j, omega, 500000);
    CHECK(std::abs(se.shift - oracle) < 1e-8);
  }
}

TEST_CASE("self-energy convergence estimate brackets refinement") {
  SpectralDensity j = SpectralDensity::ohmic(0.05, 10.0);
  SelfEnergyOptions coarse;
  coarse.order = 64;
  SelfEnergyOptions fine;
  fine.order = 128;
  SelfEnergy a = self_energy(j, 1.0, coarse);
  SelfEnergy b = self_energy(j, 1.0, fine);
  CHECK(std::abs(b.shift - a.shift) <= 1.5 * std::max(a.quadrature_error, 1e-14) + 1e-13);
}

TEST_CASE("resonance must be embedded in the continuum") {
  SpectralDensity j = SpectralDensity::ohmic(0.01, 10.0);
  CHECK_THROWS_AS(self_energy(j, -1.0), Error);
  SpectralDensity tab = ohmic_sampled(0.01, 10.0, 1.0, 64);
  CHECK_THROWS_AS(self_energy(tab, 1e5), Error);
}

TEST_CASE("second-order pole") {
  SpectralDensity j = SpectralDensity::ohmic(0.01, 10.0);
  Pole p = pole_second_order(j, 1.0);
  double closed = 2.0 * M_PI * 0.01 * std::exp(-0.1);
  CHECK(std::abs(p.gamma - closed) <= 1e-12 * closed);
  CHECK(p.gamma == doctest::Approx(5.6850e-2).epsilon(1e-4));

  SUBCASE("zero coupling is a free system") {
    SpectralDensity off = SpectralDensity::ohmic(0.0, 10.0);
    CHECK_THROWS_AS(pole_second_order(off, 1.0), Error);
    try {
      pole_second_order(off, 1.0);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::FreeSystem);
    }
  }
  SUBCASE("symmetric density leaves omega unshifted") {
    std::vector<double> grid, vals;
    for (int i = 0; i < 65; ++i) {
      double w = 2.0 * i / 64.0;
      grid.push_back(w);
      vals.push_back(0.02 * std::exp(-8.0 * (w - 1.0) * (w - 1.0)));
    }
    SpectralDensity sym = SpectralDensity::tabulated(grid, vals);
    Pole sp = pole_second_order(sym, 1.0);
    CHECK(std::abs(sp.omega_prime - 1.0) < 1e-10);
  }
  SUBCASE("tabulated twin matches the parametric pole within 1e-6") {
    SpectralDensity tab = ohmic_sampled(0.01, 10.0, 1.0, 2001);
    Pole tp = pole_second_order(tab, 1.0);
    CHECK(std::abs(tp.gamma - p.gamma) < 1e-6);
    CHECK(std::abs(tp.omega_prime - p.omega_prime) < 1e-6);
  }
}

TEST_CASE("pole ladder is exact integer scaling") {
  Pole base(1.0, 0.05);
  PoleLadder ladder = pole_ladder(base, 3);
  CHECK(ladder.member(1).omega_prime == base.omega_prime);
  CHECK(ladder.member(1).gamma == base.gamma);
  CHECK(ladder.member(2).omega_prime == 2.0 * base.omega_prime);
  CHECK(ladder.member(2).gamma == 2.0 * base.gamma);
  CHECK(ladder.member(3).gamma == 3.0 * base.gamma);
  for (int n = 1; n <= 3; ++n)
    CHECK(ladder.member(n).gamma == double(n) * ladder.member(1).gamma);
  CHECK_THROWS_AS(pole_ladder(base, 0), Error);
  CHECK_THROWS_AS(ladder.member(4), Error);
  PoleLadder single = pole_ladder(base, 1);
  CHECK(single.member(1).gamma == base.gamma);
}

TEST_CASE("pole rejects non-decaying widths") {
  CHECK_THROWS_AS(Pole(1.0, 0.0), Error);
  CHECK_THROWS_AS(Pole(1.0, -0.1), Error);
}
