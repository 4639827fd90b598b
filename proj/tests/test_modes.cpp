#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "polebasis/modes.hpp"

using namespace polebasis;

namespace {

ModeExpansion two_modes(double a1, double g1, double a2, double g2) {
  return ModeExpansion::make(0.0, {DecayMode{a1, g1, 0.0, 0.0},
                                   DecayMode{a2, g2, 0.0, 0.0}});
}

std::vector<std::pair<double, double>> sample(const ModeExpansion& exp, int n,
                                              double dt) {
  std::vector<std::pair<double, double>> s;
  for (int k = 0; k < n; ++k) s.push_back({k * dt, evaluate_expansion(exp, k * dt)});
  return s;
}

}  // namespace

TEST_CASE("expansion normalization sorts and merges") {
  ModeExpansion exp = ModeExpansion::make(
      0.1, {DecayMode{1.0, 3.0, 0.0, 0.0}, DecayMode{2.0, 1.0, 0.0, 0.0},
            DecayMode{0.5, 3.0, 0.0, 0.0}});
  REQUIRE(exp.modes.size() == 2);
  CHECK(exp.modes[0].gamma == 1.0);
  CHECK(exp.modes[1].gamma == 3.0);
  CHECK(exp.modes[1].amplitude == doctest::Approx(1.5));
  CHECK_THROWS_AS(ModeExpansion::make(0.0, {DecayMode{1.0, 0.0, 0.0, 0.0}}), Error);
}

TEST_CASE("evaluate_expansion") {
  ModeExpansion exp = ModeExpansion::make(0.5, {DecayMode{0.5, 1.0, 0.0, 0.0}});
  CHECK(evaluate_expansion(exp, 0.0) == doctest::Approx(1.0));
  CHECK(evaluate_expansion(exp, 1.0) == doctest::Approx(0.5 + 0.5 / M_E).epsilon(1e-12));
  CHECK(std::abs(evaluate_expansion(exp, 100.0) - 0.5) < 1e-15);
  CHECK_THROWS_AS(evaluate_expansion(exp, -1.0), Error);
}

TEST_CASE("relaxation time picks the slowest width") {
  CHECK(relaxation_time(two_modes(1.0, 0.05, 1.0, 1.0)) == doctest::Approx(20.0));
  ModeExpansion single = ModeExpansion::make(0.0, {DecayMode{1.0, 2.0, 0.0, 0.0}});
  CHECK(relaxation_time(single) == doctest::Approx(0.5));
  CHECK_THROWS_AS(relaxation_time(ModeExpansion::make(0.0, {})), Error);
}

TEST_CASE("gamma_eff") {
  SUBCASE("equal-weight average") {
    CHECK(gamma_eff(two_modes(1.0, 1.0, 1.0, 3.0)) == doctest::Approx(2.0));
  }
  SUBCASE("single mode ignores the amplitude") {
    ModeExpansion exp = ModeExpansion::make(0.0, {DecayMode{-4.0, 2.5, 0.0, 0.0}});
    CHECK(gamma_eff(exp) == doctest::Approx(2.5));
  }
  SUBCASE("weighted average") {
    CHECK(gamma_eff(two_modes(3.0, 1.0, 1.0, 5.0)) == doctest::Approx(2.0));
  }
  SUBCASE("vanishing amplitude sum is degenerate") {
    CHECK_THROWS_AS(gamma_eff(two_modes(1.0, 1.0, -1.0, 3.0)), Error);
  }
  SUBCASE("mixed signs flag the out-of-range warning") {
    GammaEffResult r = gamma_eff_checked(two_modes(2.0, 1.0, -1.0, 3.0));
    CHECK(r.value == doctest::Approx(-1.0));
    CHECK(r.mixed_sign_warning);
  }
  SUBCASE("exclude-slowest reading") {
    ModeExpansion exp = two_modes(1.0, 0.01, 1.0, 10.0);
    CHECK(gamma_eff(exp, GammaEffConvention::AllModes) == doctest::Approx(5.005));
    CHECK(gamma_eff(exp, GammaEffConvention::ExcludeSlowest) == doctest::Approx(10.0));
  }
}

TEST_CASE("decoherence time and the two-pole example") {
  CHECK(decoherence_time(two_modes(1.0, 1.0, 1.0, 3.0)) == doctest::Approx(0.5));
  // Two poles with gamma0 << gamma1: the all-modes reading lands within a
  // factor two of hbar / gamma1.
  ModeExpansion exp = two_modes(1.0, 0.01, 1.0, 10.0);
  double td_all = decoherence_time(exp, GammaEffConvention::AllModes);
  CHECK(td_all == doctest::Approx(1.0 / 5.005).epsilon(1e-12));
  CHECK(td_all / 0.1 > 1.0);
  CHECK(td_all / 0.1 < 2.1);
  CHECK(decoherence_time(exp, GammaEffConvention::ExcludeSlowest) ==
        doctest::Approx(0.1));
}

TEST_CASE("classification") {
  SUBCASE("strict split") {
    ModeClassification cls = classify_modes(two_modes(1.0, 1.0, 1.0, 3.0));
    REQUIRE(cls.slow.size() == 1);
    REQUIRE(cls.fast.size() == 1);
    CHECK(cls.slow[0].gamma == 1.0);
    CHECK(cls.fast[0].gamma == 3.0);
  }
  SUBCASE("single mode sits on the boundary and goes slow") {
    ModeExpansion exp = ModeExpansion::make(0.0, {DecayMode{1.0, 2.0, 0.0, 0.0}});
    ModeClassification cls = classify_modes(exp);
    CHECK(cls.slow.size() == 1);
    CHECK(cls.fast.empty());
  }
  SUBCASE("equal widths classify slow") {
    ModeExpansion exp = ModeExpansion::make(
        0.0, {DecayMode{1.0, 2.0, 0.0, 0.0}, DecayMode{3.0, 2.0, 1.0, 0.0}});
    ModeClassification cls = classify_modes(exp);
    CHECK(cls.fast.empty());
    CHECK(cls.slow.size() == exp.modes.size());
  }
}

TEST_CASE("short-time log expansion") {
  ModeExpansion exp = two_modes(1.0, 1.0, 1.0, 3.0);
  auto [g0, g1] = short_time_log_expansion(exp);
  CHECK(g0 == doctest::Approx(std::log(2.0)));
  CHECK(g1 == doctest::Approx(-2.0));

  SUBCASE("single exponential is linearized exactly") {
    ModeExpansion single = ModeExpansion::make(0.0, {DecayMode{1.0, 1.7, 0.0, 0.0}});
    auto [h0, h1] = short_time_log_expansion(single);
    CHECK(h0 == doctest::Approx(0.0));
    CHECK(h1 == doctest::Approx(-1.7));
    for (double t : {0.1, 1.0, 5.0}) {
      double lhs = std::log(evaluate_expansion(single, t));
      CHECK(lhs == doctest::Approx(h0 + h1 * t).epsilon(1e-12));
    }
  }
  SUBCASE("finite-difference oracle for g1") {
    double prev_err = 1e9;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
      double fd = (std::log(evaluate_expansion(exp, h)) -
                   std::log(evaluate_expansion(exp, 0.0))) / h;
      double err = std::abs(fd - g1);
      CHECK(err < prev_err);  // O(h) convergence
      prev_err = err;
    }
  }
  SUBCASE("non-positive amplitude sum") {
    CHECK_THROWS_AS(short_time_log_expansion(two_modes(1.0, 1.0, -2.0, 3.0)), Error);
  }
}

TEST_CASE("extract_modes recovers planted signals") {
  SUBCASE("two decays plus a constant") {
    ModeExpansion planted = ModeExpansion::make(
        0.3, {DecayMode{2.0, 0.1, 0.0, 0.0}, DecayMode{0.5, 1.5, 0.0, 0.0}});
    ExtractionResult r = extract_modes(sample(planted, 64, 0.5), 2);
    CHECK(!r.unstable);
    REQUIRE(r.expansion.modes.size() == 2);
    CHECK(std::abs(r.expansion.equilibrium - 0.3) < 1e-6);
    CHECK(std::abs(r.expansion.modes[0].gamma - 0.1) < 1e-7);
    CHECK(std::abs(r.expansion.modes[0].amplitude - 2.0) < 1e-6);
    CHECK(std::abs(r.expansion.modes[1].gamma - 1.5) < 1e-6);
    CHECK(std::abs(r.expansion.modes[1].amplitude - 0.5) < 1e-6);
  }
  SUBCASE("constant signal flags an unstable gamma ~ 0") {
    std::vector<std::pair<double, double>> s;
    for (int k = 0; k < 32; ++k) s.push_back({k * 0.5, 0.7});
    ExtractionResult r = extract_modes(s, 1);
    CHECK(r.unstable);
    CHECK(r.expansion.modes.empty());
    CHECK(std::abs(r.expansion.equilibrium - 0.7) < 1e-12);
    REQUIRE(r.rejected.size() == 1);
    CHECK(std::abs(r.rejected[0].gamma) < 1e-9);
  }
  SUBCASE("oscillatory mode") {
    ModeExpansion planted = ModeExpansion::make(0.0, {DecayMode{1.0, 1.0, 2.0, 0.0}});
    ExtractionResult r = extract_modes(sample(planted, 64, 0.2), 2);
    REQUIRE(r.expansion.modes.size() == 1);
    CHECK(std::abs(r.expansion.modes[0].gamma - 1.0) < 1e-6);
    CHECK(std::abs(r.expansion.modes[0].omega - 2.0) < 1e-6);
    CHECK(std::abs(r.expansion.modes[0].amplitude - 1.0) < 1e-6);
    CHECK(std::abs(r.expansion.modes[0].phase) < 1e-6);
  }
  SUBCASE("non-uniform sampling is rejected") {
    std::vector<std::pair<double, double>> s = {
        {0.0, 1.0}, {0.5, 0.9}, {1.2, 0.8}, {1.5, 0.7}, {2.0, 0.6}, {2.5, 0.5}};
    CHECK_THROWS_AS(extract_modes(s, 1), Error);
  }
  SUBCASE("rank deficiency when the order is too high") {
    ModeExpansion planted = ModeExpansion::make(0.0, {DecayMode{1.0, 0.5, 0.0, 0.0}});
    CHECK_THROWS_AS(extract_modes(sample(planted, 48, 0.25), 4), Error);
  }
  SUBCASE("too few samples") {
    std::vector<std::pair<double, double>> s = {{0.0, 1.0}, {1.0, 0.5}};
    CHECK_THROWS_AS(extract_modes(s, 1), Error);
  }
}

TEST_CASE("timescale report derives its times") {
  TimescaleReport ts;
  ts.hbar = 2.0;
  ts.gamma0 = 0.05;
  ts.gamma_eff = 2.5;
  CHECK(ts.t_R() == doctest::Approx(40.0));
  CHECK(ts.t_D() == doctest::Approx(0.8));
}
