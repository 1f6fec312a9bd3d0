#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "duel/closed_form.hpp"
#include "duel/rational.hpp"

using namespace duel;

TEST_CASE("stationary payoff basics") {
  const GameParams params(0.9, 0.3, 0.5);
  // Nobody ever shoots: both collect the full normalized payoff.
  const auto vc = v_stationary(params, 0.0, 0.0);
  CHECK(vc.v1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(vc.v2 == doctest::Approx(1.0).epsilon(1e-14));
  // Index swap: player 2's payoff is player 1's with roles exchanged.
  const auto a = v_stationary(params, 0.3, 0.8);
  const auto b = v_stationary(params.swapped(), 0.8, 0.3);
  CHECK(a.v1 == doctest::Approx(b.v2).epsilon(1e-14));
  CHECK(a.v2 == doctest::Approx(b.v1).epsilon(1e-14));
  CHECK(a.V1 == doctest::Approx(a.v1 / (1.0 - params.gamma)).epsilon(1e-14));
  CHECK_THROWS_AS(v_stationary(params, -0.1, 0.5), std::invalid_argument);
}

TEST_CASE("payoff against a never-shooter is 1 in exact arithmetic") {
  const Rational g = rational(9, 10), p1 = rational(3, 10), p2 = rational(1, 2);
  for (long long num = 0; num <= 4; ++num) {
    const Rational x1 = rational(num, 4);
    CHECK(formula::v1_stationary(g, p1, p2, x1, Rational(0)) == Rational(1));
  }
}

TEST_CASE("degeneration identities in exact arithmetic") {
  const Rational g = rational(3, 4), p1 = rational(1, 5), p2 = rational(2, 3);
  CHECK(formula::v1_late_shoot(g, p1, p2, 1) == formula::v1_defect(g, p1, p2));
  CHECK(formula::v1_periodic(g, p1, p2, 0) == formula::v1_defect(g, p1, p2));
  CHECK(formula::v1_early_shoot(g, p1, p2, 0) == Rational(1));
}

TEST_CASE("early-shoot family converges to always-shoot as the window grows") {
  const GameParams params(0.8, 0.4, 0.6);
  const double vd = formula::v1_defect(params.gamma, params.p1, params.p2);
  double prev_err = 1e300;
  for (int k = 1; k <= 40; k += 3) {
    const double v =
        formula::v1_early_shoot(params.gamma, params.p1, params.p2, k);
    const double err = std::abs(v - vd);
    CHECK(err < prev_err + 1e-15);
    prev_err = err;
  }
  CHECK(prev_err < 1e-9);
}

TEST_CASE("own shoot probability is payoff-improving when the opponent shoots") {
  const GameParams params(0.9, 0.3, 0.5);
  for (double x2 : {0.2, 0.5, 1.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
      const double x1 = i / 20.0;
      const double v = v_stationary(params, x1, x2).v1;
      CHECK(v >= prev - 1e-14);
      prev = v;
    }
  }
}

TEST_CASE("cooperation gap formula matches the profile difference") {
  for (const auto& params :
       {GameParams(0.5, 0.5, 0.5), GameParams(0.9, 0.3, 0.5),
        GameParams(0.2, 0.8, 0.1)}) {
    const auto vc = v_profile(StrategySpec::cooperate(), StrategySpec::cooperate(),
                              params);
    const auto vd = v_profile(StrategySpec::defect(), StrategySpec::defect(),
                              params);
    CHECK(cooperation_gap(params, 1) ==
          doctest::Approx(vc.V1 - vd.V1).epsilon(1e-12));
    CHECK(cooperation_gap(params, 2) ==
          doctest::Approx(vc.V2 - vd.V2).epsilon(1e-12));
    CHECK(cooperation_gap(params, 1) > 0.0);
    CHECK(cooperation_gap(params, 2) > 0.0);
  }
}

TEST_CASE("v_profile rejects mixed families") {
  const GameParams params(0.5, 0.5, 0.5);
  CHECK_THROWS_AS(v_profile(StrategySpec::cooperate(), StrategySpec::defect(),
                            params),
                  std::invalid_argument);
  CHECK_THROWS_AS(v_profile(StrategySpec::early_shoot(2),
                            StrategySpec::early_shoot(3), params),
                  std::invalid_argument);
}

TEST_CASE("sign polynomial decomposition is consistent") {
  for (int m = 2; m <= 12; ++m) {
    for (int k = 1; k <= m - 1; k += 2) {
      for (double gamma : {0.5, 0.9, 0.99}) {
        for (double p : {0.05, 0.3, 0.7}) {
          const auto sp = sign_polynomials(m, k, gamma, p);
          // Absolute comparisons: the decomposition can cancel to near zero.
          CHECK(std::abs(sp.f_mk - (sp.f1 + sp.f2)) < 1e-14);
          // The bracket is the same polynomial with gamma^{K+2} factored out.
          CHECK(std::abs(sp.f_mk - std::pow(gamma, k + 2) * sp.bracket) < 1e-12);
        }
      }
    }
  }
  CHECK_THROWS_AS(sign_polynomials(3, 3, 0.9, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(sign_polynomials(3, 0, 0.9, 0.1), std::invalid_argument);
}

TEST_CASE("factored bracket survives where raw powers underflow") {
  // At M = 8000 the raw gamma^{M+1} term underflows to 0, but the factored
  // bracket still carries the correct (finite, nonzero) sign information.
  const int m = 8000, k = 200;
  const auto sp = sign_polynomials(m, k, 0.9, 0.05);
  CHECK(std::isfinite(sp.bracket));
  CHECK(sp.bracket != 0.0);
}

TEST_CASE("center-point sign constants") {
  CHECK(h1_center(1) == doctest::Approx(0.060703).epsilon(1e-4));
  CHECK(h2_center(2) == doctest::Approx(0.064222).epsilon(1e-4));
  for (int m = 2; m <= 50; ++m) {
    CHECK(h1_center(m) > h2_center(m));
    CHECK(h2_center(m) > 0.0);
  }
}

TEST_CASE("deviation gain wrappers validate their ranges") {
  const GameParams params(0.9, 0.3, 0.5);
  CHECK_THROWS_AS(late_shoot_early_onset_gain(params, 0), std::invalid_argument);
  CHECK_THROWS_AS(early_shoot_skip_limit_gain(0, 0.3, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(periodic_early_shot_gain(params, 3, 3), std::invalid_argument);
  CHECK_NOTHROW(periodic_early_shot_gain(params, 3, 0));
  CHECK(stay_gain_vs_grim_cooperate(params) > 0.0);
}
