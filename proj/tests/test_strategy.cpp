#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "duel/strategy.hpp"

using namespace duel;

namespace {

// Emission trace for rounds 1..n on a fixed pair of observed action streams.
std::vector<double> trace(const StrategyAutomaton& a, int n,
                          const std::vector<int>& opponent_actions = {}) {
  std::vector<double> out;
  auto m = a.initial();
  for (int t = 1; t <= n; ++t) {
    out.push_back(a.emit(m));
    const int own = a.emit(m) >= 0.5 ? 1 : 0;
    const int opp = t - 1 < static_cast<int>(opponent_actions.size())
                        ? opponent_actions[static_cast<std::size_t>(t - 1)]
                        : own;
    m = a.advance(m, own, opp);
  }
  return out;
}

}  // namespace

TEST_CASE("parse round trips and grammar errors") {
  for (const char* text : {"C", "D", "DC:4", "CD:4", "P:3", "grim-C",
                           "grim-DC:2", "grim-P:1"}) {
    const auto spec = StrategySpec::parse(text);
    CHECK(spec.to_string() == text);
  }
  const auto x = StrategySpec::parse("x:0.3");
  CHECK(x.kind == StrategyKind::Stationary);
  CHECK(x.x == doctest::Approx(0.3));
  CHECK_FALSE(x.grim);

  for (const char* bad : {"", "E", "DC", "DC:", "DC:-1", "CD:0", "x:1.5",
                          "grim-x:0.5", "P:abc", "grimC"}) {
    CHECK_THROWS_AS(StrategySpec::parse(bad), std::invalid_argument);
  }
  // Degenerate grim stationary endpoints are observable, hence allowed.
  CHECK_NOTHROW(StrategySpec::parse("grim-x:0"));
  CHECK_NOTHROW(StrategySpec::parse("grim-x:1"));
}

TEST_CASE("compiled emission schedules") {
  const auto dc2 = StrategyAutomaton::compile(StrategySpec::early_shoot(2));
  CHECK(trace(dc2, 5) == std::vector<double>{1, 1, 0, 0, 0});

  const auto cd3 = StrategyAutomaton::compile(StrategySpec::late_shoot(3));
  CHECK(trace(cd3, 5) == std::vector<double>{0, 0, 1, 1, 1});

  const auto p2 = StrategyAutomaton::compile(StrategySpec::periodic(2));
  CHECK(trace(p2, 7) == std::vector<double>{0, 0, 1, 0, 0, 1, 0});

  const auto c = StrategyAutomaton::compile(StrategySpec::cooperate());
  CHECK(trace(c, 3) == std::vector<double>{0, 0, 0});
  CHECK(c.silent_forever(c.initial()));
  CHECK_FALSE(p2.silent_forever(p2.initial()));
  CHECK(dc2.silent_forever(dc2.advance(dc2.advance(dc2.initial(), 1, 1), 1, 1)));
}

TEST_CASE("grim trigger fires on observed deviation and absorbs") {
  const auto grim_c = StrategyAutomaton::compile(StrategySpec::cooperate(true));
  auto m = grim_c.initial();
  m = grim_c.advance(m, 0, 0);  // opponent complied
  CHECK(grim_c.emit(m) == 0.0);
  m = grim_c.advance(m, 0, 1);  // opponent shot
  CHECK(grim_c.emit(m) == 1.0);
  for (int t = 0; t < 10; ++t) {
    m = grim_c.advance(m, 1, 0);
    CHECK(grim_c.emit(m) == 1.0);  // no forgiveness
  }
}

TEST_CASE("grim wrap of always-shoot behaves as always-shoot") {
  const auto d = StrategyAutomaton::compile(StrategySpec::defect());
  const auto grim_d = StrategyAutomaton::compile(StrategySpec::defect(true));
  for (const std::vector<int> opp : {std::vector<int>{1, 1, 1, 1},
                                     std::vector<int>{0, 1, 0, 0},
                                     std::vector<int>{0, 0, 0, 0}}) {
    CHECK(trace(d, 4, opp) == trace(grim_d, 4, opp));
  }
}

TEST_CASE("memory indexing is a bijection on the reachable set") {
  for (const auto spec : {StrategySpec::early_shoot(5, true),
                          StrategySpec::periodic(4, true),
                          StrategySpec::late_shoot(3)}) {
    const auto a = StrategyAutomaton::compile(spec);
    for (int i = 0; i < a.memory_count(); ++i)
      CHECK(a.index(a.memory_at(i)) == i);
  }
}

TEST_CASE("schedules are eventually periodic with bounded memory") {
  for (int k = 1; k <= 32; ++k) {
    for (const auto spec :
         {StrategySpec::early_shoot(k), StrategySpec::late_shoot(k),
          StrategySpec::periodic(k)}) {
      const auto a = StrategyAutomaton::compile(spec);
      auto m = a.initial();
      for (int t = 0; t < 5 * (k + 2); ++t) {
        m = a.advance(m, 0, 0);
        CHECK(a.index(m) < a.memory_count());
      }
      // After enough rounds the clock must live inside the cycle: advancing
      // by one full cycle returns to the same memory.
      auto probe = m;
      const int period = k + 2;  // any multiple of the cycle length works
      for (int t = 0; t < period * (k + 2); ++t) probe = a.advance(probe, 0, 0);
      bool revisited = false;
      auto scan = m;
      for (int t = 0; t < a.memory_count() + 1 && !revisited; ++t) {
        scan = a.advance(scan, 0, 0);
        revisited = scan == probe;
      }
      CHECK(revisited);
    }
  }
}

TEST_CASE("validation rejects undefined combinations") {
  CHECK_THROWS_AS(StrategySpec::late_shoot(0), std::invalid_argument);
  CHECK_THROWS_AS(StrategySpec::stationary(1.2), std::invalid_argument);
  StrategySpec mixed_grim{StrategyKind::Stationary, 0.5, 0, true};
  CHECK_THROWS_AS(mixed_grim.validate(), std::invalid_argument);
  CHECK_THROWS_AS(StrategyAutomaton::from_schedule({}, {}, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(StrategyAutomaton::from_schedule({}, {0.5}, true),
                  std::invalid_argument);
}
