#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "duel/closed_form.hpp"
#include "duel/evaluator.hpp"

using namespace duel;

TEST_CASE("exact payoff of reference profiles") {
  const GameParams params(0.5, 0.5, 0.5);
  const auto cc = exact_payoff(StrategySpec::cooperate(),
                               StrategySpec::cooperate(), params);
  CHECK(cc.payoff.v1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cc.payoff.v2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cc.tail_bound == 0.0);

  const auto dd =
      exact_payoff(StrategySpec::defect(), StrategySpec::defect(), params);
  CHECK(dd.payoff.v1 == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
  CHECK(dd.payoff.v2 == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("evaluator agrees with the stationary closed form") {
  SplitMix64 rng(101);
  for (int i = 0; i < 50; ++i) {
    const GameParams params(0.05 + 0.9 * rng.uniform(),
                            0.05 + 0.9 * rng.uniform(),
                            0.05 + 0.9 * rng.uniform());
    const double x1 = rng.uniform(), x2 = rng.uniform();
    const auto cf = v_stationary(params, x1, x2);
    const auto dp = exact_payoff(StrategySpec::stationary(x1),
                                 StrategySpec::stationary(x2), params);
    CHECK(std::abs(cf.v1 - dp.payoff.v1) < 1e-10);
    CHECK(std::abs(cf.v2 - dp.payoff.v2) < 1e-10);
  }
}

TEST_CASE("index-swap symmetry") {
  const GameParams params(0.85, 0.25, 0.65);
  for (const auto& [s1, s2] :
       {std::pair{StrategySpec::early_shoot(3, true), StrategySpec::periodic(2)},
        std::pair{StrategySpec::defect(), StrategySpec::late_shoot(4, true)},
        std::pair{StrategySpec::stationary(0.4), StrategySpec::cooperate(true)}}) {
    const auto fwd = exact_payoff(s1, s2, params);
    const auto rev = exact_payoff(s2, s1, params.swapped());
    CHECK(fwd.payoff.v1 == doctest::Approx(rev.payoff.v2).epsilon(1e-13));
    CHECK(fwd.payoff.v2 == doctest::Approx(rev.payoff.v1).epsilon(1e-13));
  }
}

TEST_CASE("grim wrapping leaves on-path payoffs unchanged") {
  const GameParams params(0.9, 0.3, 0.5);
  for (const auto& [plain, grim] :
       {std::pair{StrategySpec::periodic(3), StrategySpec::periodic(3, true)},
        std::pair{StrategySpec::late_shoot(2), StrategySpec::late_shoot(2, true)}}) {
    const auto a = exact_payoff(plain, plain, params);
    const auto b = exact_payoff(grim, grim, params);
    CHECK(a.payoff.v1 == doctest::Approx(b.payoff.v1).epsilon(1e-13));
    CHECK(a.payoff.v2 == doctest::Approx(b.payoff.v2).epsilon(1e-13));
  }
}

TEST_CASE("Monte Carlo is deterministic and scheduling-independent") {
  const GameParams params(0.8, 0.3, 0.5);
  const auto s1 = StrategySpec::periodic(2, true);
  const auto s2 = StrategySpec::periodic(2, true);
  const auto a = mc_payoff(s1, s2, params, 20'000, 7);
  const auto b = mc_payoff(s1, s2, params, 20'000, 7);
  const auto c = mc_payoff_serial(s1, s2, params, 20'000, 7);
  CHECK(a.estimate.v1 == b.estimate.v1);
  CHECK(a.stderr1 == b.stderr1);
  CHECK(a.estimate.v1 == c.estimate.v1);
  CHECK(a.estimate.v2 == c.estimate.v2);
  CHECK(a.stderr1 == c.stderr1);
  CHECK(a.stderr2 == c.stderr2);
  const auto other_seed = mc_payoff(s1, s2, params, 20'000, 8);
  CHECK(a.estimate.v1 != other_seed.estimate.v1);
}

TEST_CASE("Monte Carlo estimate is statistically consistent with the evaluator") {
  SplitMix64 rng(2024);
  for (int i = 0; i < 5; ++i) {
    const GameParams params(0.3 + 0.6 * rng.uniform(),
                            0.2 + 0.6 * rng.uniform(),
                            0.2 + 0.6 * rng.uniform());
    const double x1 = rng.uniform(), x2 = rng.uniform();
    const auto s1 = StrategySpec::stationary(x1);
    const auto s2 = StrategySpec::stationary(x2);
    const auto dp = exact_payoff(s1, s2, params);
    const auto mc = mc_payoff(s1, s2, params, 50'000, 1000 + i);
    // 5-sigma bands; a systematic bias would blow through them.
    CHECK(std::abs(mc.estimate.v1 - dp.payoff.v1) <=
          5.0 * mc.stderr1 + 1e-12);
    CHECK(std::abs(mc.estimate.v2 - dp.payoff.v2) <=
          5.0 * mc.stderr2 + 1e-12);
  }
}

TEST_CASE("horizon handling") {
  CHECK(default_max_rounds(0.5) >= 1);
  CHECK(default_max_rounds(0.999999) == 1'000'000);
  // A tiny forced horizon must not bias the estimate: the tail is settled
  // analytically from the reached product state.
  const GameParams params(0.95, 0.3, 0.5);
  const auto s = StrategySpec::periodic(3);
  const auto dp = exact_payoff(s, s, params);
  const auto mc = mc_payoff(s, s, params, 50'000, 11, /*max_rounds=*/2);
  CHECK(std::abs(mc.estimate.v1 - dp.payoff.v1) <= 5.0 * mc.stderr1 + 1e-12);
  CHECK_THROWS_AS(mc_payoff(s, s, params, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(mc_payoff(s, s, params, 10, 1, -1), std::invalid_argument);
}
