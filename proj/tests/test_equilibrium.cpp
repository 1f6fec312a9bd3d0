#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "duel/closed_form.hpp"
#include "duel/equilibrium.hpp"

using namespace duel;

TEST_CASE("stationary best response") {
  const GameParams params(0.9, 0.3, 0.5);
  const auto vs_silent = best_response_stationary(0.0, params);
  CHECK(vs_silent.tie);
  CHECK(vs_silent.x_star == 0.0);
  CHECK(vs_silent.value == doctest::Approx(1.0));

  const auto vs_half = best_response_stationary(0.5, params);
  CHECK_FALSE(vs_half.tie);
  CHECK(vs_half.x_star == 1.0);
  // Shooting always strictly beats every smaller probability.
  for (int i = 0; i < 20; ++i) {
    const double y = i / 20.0;
    CHECK(vs_half.value >= v_stationary(params, y, 0.5).v1 - 1e-14);
  }

  const auto mirror = best_response_stationary(1.0, GameParams(0.5, 0.5, 0.5));
  CHECK(mirror.value == doctest::Approx(5.0 / 7.0).epsilon(1e-13));
}

TEST_CASE("best response vs automaton: known opponents") {
  const GameParams params(0.9, 0.3, 0.5);

  // Grim never-shooter: complying forever is optimal (normalized value 1).
  const auto grim_c = StrategyAutomaton::compile(StrategySpec::cooperate(true));
  const auto br_c = best_response_vs_automaton(grim_c, params, 1e-9);
  CHECK(br_c.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(br_c.policy[grim_c.index(grim_c.initial())] == 0);

  // Always-shooter: best response is to shoot back.
  const auto d = StrategyAutomaton::compile(StrategySpec::defect());
  const auto br_d = best_response_vs_automaton(d, params, 1e-9);
  CHECK(br_d.value ==
        doctest::Approx(formula::v1_defect(params.gamma, params.p1, params.p2))
            .epsilon(1e-10));
  CHECK(br_d.policy[d.index(d.initial())] == 1);

  // Non-grim never-shooter: every policy earns 1.
  const auto c = StrategyAutomaton::compile(StrategySpec::cooperate());
  CHECK(best_response_vs_automaton(c, params, 1e-9).value ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("value iteration contracts geometrically") {
  const GameParams params(0.9, 0.3, 0.5);
  const auto opp = StrategyAutomaton::compile(StrategySpec::periodic(4, true));
  const auto br = best_response_vs_automaton(opp, params, 1e-9);
  REQUIRE(br.residuals.size() >= 2);
  for (std::size_t n = 1; n < br.residuals.size(); ++n) {
    CHECK(br.residuals[n] <=
          std::pow(params.gamma, static_cast<double>(n)) * br.residuals[0] *
                  (1.0 + 1e-9) +
              1e-300);
  }
}

TEST_CASE("best response never loses to compliance") {
  const GameParams params(0.85, 0.35, 0.45);
  for (const auto spec :
       {StrategySpec::cooperate(true), StrategySpec::defect(),
        StrategySpec::early_shoot(3, true), StrategySpec::late_shoot(3, true),
        StrategySpec::periodic(2, true), StrategySpec::stationary(0.3)}) {
    const auto on_path = exact_payoff(spec, spec, params);
    const auto br = best_response_vs_automaton(StrategyAutomaton::compile(spec),
                                               params, 1e-9);
    CHECK(br.value >= on_path.payoff.v1 - 1e-9);
  }
}

TEST_CASE("equilibrium certification of known profiles") {
  const GameParams params(0.9, 0.3, 0.5);

  const auto ne = check_ne(StrategySpec::cooperate(true),
                           StrategySpec::cooperate(true), params, 1e-9);
  CHECK(ne.ne);
  CHECK(ne.gain1 <= 1e-9);
  CHECK(ne.gain2 <= 1e-9);
  CHECK_FALSE(ne.witness.has_value());

  const auto dd =
      check_ne(StrategySpec::defect(), StrategySpec::defect(), params, 1e-9);
  CHECK(dd.ne);

  const auto mixed = check_ne(StrategySpec::stationary(0.5),
                              StrategySpec::stationary(0.5), params, 1e-9);
  CHECK_FALSE(mixed.ne);
  REQUIRE(mixed.witness.has_value());
  CHECK(mixed.witness->gain > 1e-9);
}

TEST_CASE("refuting the grim late-shoot profile with the known witness gain") {
  const GameParams params(0.5, 0.5, 0.5);
  const auto cert = check_ne(StrategySpec::late_shoot(2, true),
                             StrategySpec::late_shoot(2, true), params, 1e-9);
  CHECK_FALSE(cert.ne);
  REQUIRE(cert.witness.has_value());
  // Closed-form gain of shooting one round before the onset:
  // gamma^K p1 p2 / (1 - gamma q1 q2) = 1/14 here.
  CHECK(cert.witness->gain == doctest::Approx(1.0 / 14.0).epsilon(1e-10));
  CHECK(cert.witness->gain ==
        doctest::Approx(-late_shoot_early_onset_gain(params, 2)).epsilon(1e-10));
  // The interpretable witness can never beat the MDP optimum.
  const double mdp_gain = std::max(cert.gain1, cert.gain2);
  CHECK(cert.witness->gain <= mdp_gain + 1e-9);
}

TEST_CASE("stationary scan finds exactly the two corner equilibria") {
  const GameParams params(0.9, 0.3, 0.5);
  const auto coarse = stationary_ne_scan(params, 11, 1e-9);
  const auto fine = stationary_ne_scan(params, 101, 1e-9);
  REQUIRE(coarse.size() == 2);
  CHECK(coarse[0] == std::pair{0.0, 0.0});
  CHECK(coarse[1] == std::pair{1.0, 1.0});
  // Refinement invariance: no new equilibria appear on the finer grid.
  CHECK(fine == coarse);
  CHECK_THROWS_AS(stationary_ne_scan(params, 1, 1e-9), std::invalid_argument);
}

TEST_CASE("discount threshold search") {
  const double g0 = find_gamma0(1, 0.3, 0.5, 1e-6);
  CHECK(g0 >= 0.0);
  CHECK(g0 < 1.0);
  if (g0 > 0.0) {
    // Just above the threshold the profile survives the skip deviation;
    // comfortably below it (when the root is interior) it does not.
    const GameParams above(std::min(0.999, g0 + 1e-3), 0.3, 0.5);
    const auto base = exact_payoff(StrategySpec::early_shoot(1, true),
                                   StrategySpec::early_shoot(1, true), above);
    const auto dev = exact_payoff(
        StrategyAutomaton::from_schedule({0.0}, {1.0}),
        StrategyAutomaton::compile(StrategySpec::early_shoot(1, true)), above);
    CHECK(base.payoff.v1 - dev.payoff.v1 > 0.0);
  }
  CHECK_THROWS_AS(find_gamma0(0, 0.3, 0.5, 1e-6), std::invalid_argument);
}

TEST_CASE("periodic region scan") {
  const auto scan = periodic_region_scan(1, 3, 0.01);
  CHECK(scan.center_ne);
  CHECK(scan.empirical_delta > 0.0);
  CHECK(scan.center_gamma == doctest::Approx(0.9));
  CHECK(scan.center_p ==
        doctest::Approx((1.0 - std::exp(-1.0)) / 10.0).epsilon(1e-12));
  CHECK(scan.grid.size() == 27);
  for (const auto& pt : scan.grid) CHECK(pt.min_gain > 0.0);
  CHECK_THROWS_AS(periodic_region_scan(0, 3, 0.01), std::invalid_argument);
}
