#include "duel/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "duel/closed_form.hpp"
#include "duel/equilibrium.hpp"
#include "duel/evaluator.hpp"
#include "duel/rational.hpp"

namespace duel {

namespace {

struct Check {
  bool pass = true;
  std::ostringstream details;

  void require(bool cond, const std::string& msg) {
    if (!cond) {
      if (!pass) details << "; ";
      details << msg;
      pass = false;
    }
  }
};

double uniform_in(SplitMix64& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// --- 1. stationary closed form against the exact evaluator -----------------
void criterion_stationary_oracle(Check& c) {
  SplitMix64 rng(0x5EED0001ull);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const GameParams params(uniform_in(rng, 0.02, 0.98),
                            uniform_in(rng, 0.01, 0.99),
                            uniform_in(rng, 0.01, 0.99));
    const double x1 = rng.uniform();
    const double x2 = rng.uniform();
    const PayoffPair cf = v_stationary(params, x1, x2);
    const PayoffPair dp = exact_payoff(StrategySpec::stationary(x1),
                                       StrategySpec::stationary(x2), params)
                              .payoff;
    worst = std::max({worst, std::abs(cf.v1 - dp.v1), std::abs(cf.v2 - dp.v2)});
  }
  c.require(worst <= 1e-9, "max |closed form - evaluator| = " + fmt(worst));
  if (c.pass) c.details << "1000 tuples, max deviation " << fmt(worst);
}

// --- 2. family closed forms against the exact evaluator --------------------
void criterion_family_oracle(Check& c) {
  SplitMix64 rng(0x5EED0002ull);
  std::vector<StrategySpec> profiles{StrategySpec::cooperate(),
                                     StrategySpec::defect()};
  for (int k = 1; k <= 8; ++k) {
    profiles.push_back(StrategySpec::early_shoot(k));
    profiles.push_back(StrategySpec::late_shoot(k));
    profiles.push_back(StrategySpec::periodic(k));
  }
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const GameParams params(uniform_in(rng, 0.05, 0.95),
                            uniform_in(rng, 0.05, 0.95),
                            uniform_in(rng, 0.05, 0.95));
    for (const auto& spec : profiles) {
      const PayoffPair cf = v_profile(spec, spec, params);
      const PayoffPair dp = exact_payoff(spec, spec, params).payoff;
      worst = std::max({worst, std::abs(cf.v1 - dp.v1), std::abs(cf.v2 - dp.v2)});
    }
  }
  c.require(worst <= 1e-9, "max |closed form - evaluator| = " + fmt(worst));
  if (c.pass) c.details << "26 profiles x 100 parameter points, max deviation "
                        << fmt(worst);
}

// --- 3. degeneration identities in exact arithmetic ------------------------
void criterion_degeneration(Check& c) {
  using R = Rational;
  const std::vector<std::array<R, 3>> grid{
      {rational(1, 2), rational(1, 2), rational(1, 2)},
      {rational(9, 10), rational(3, 10), rational(1, 2)},
      {rational(3, 4), rational(1, 5), rational(2, 3)},
      {rational(1, 3), rational(9, 11), rational(1, 7)},
      {rational(99, 100), rational(1, 100), rational(97, 100)},
  };
  for (const auto& [g, p1, p2] : grid) {
    const R vd = formula::v1_defect(g, p1, p2);
    c.require(formula::v1_late_shoot(g, p1, p2, 1) == vd,
              "shoot-from-round-1 != always-shoot");
    c.require(formula::v1_periodic(g, p1, p2, 0) == vd,
              "period-1 schedule != always-shoot");
    c.require(formula::v1_early_shoot(g, p1, p2, 0) == R(1),
              "empty shooting window != never-shoot");
  }
  if (c.pass) c.details << "exact equality on 5 rational parameter triples";
}

// --- 4. stationary equilibria are exactly the two corners ------------------
void criterion_stationary_scan(Check& c) {
  SplitMix64 rng(0x5EED0004ull);
  for (int i = 0; i < 20; ++i) {
    const GameParams params(uniform_in(rng, 0.3, 0.95),
                            uniform_in(rng, 0.2, 0.8),
                            uniform_in(rng, 0.2, 0.8));
    const auto found = stationary_ne_scan(params, 101, 1e-9);
    const bool ok = found.size() == 2 && found.front() == std::pair{0.0, 0.0} &&
                    found.back() == std::pair{1.0, 1.0};
    c.require(ok, "scan at gamma=" + fmt(params.gamma) + " returned " +
                      std::to_string(found.size()) + " profiles");
  }
  if (c.pass) c.details << "20 parameter triples, resolution 101";
}

// --- 5. grim never-shoot profile is an equilibrium -------------------------
void criterion_grim_cooperate(Check& c) {
  SplitMix64 rng(0x5EED0005ull);
  const auto grim_c = StrategySpec::cooperate(true);
  double worst_gap = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double p1 = uniform_in(rng, 0.05, 0.95);
    const double p2 = uniform_in(rng, 0.05, 0.95);
    for (int j = 1; j <= 19; ++j) {
      const GameParams params(0.05 * j, p1, p2);
      const auto cert = check_ne(grim_c, grim_c, params, 1e-9);
      c.require(cert.ne, "grim never-shoot not certified at gamma=" +
                             fmt(params.gamma));
      // Forgone amount of the shoot-at-round-1 deviation, closed form vs
      // evaluator difference.
      const double cf = stay_gain_vs_grim_cooperate(params);
      const double ev =
          1.0 - exact_payoff(StrategyAutomaton::compile(StrategySpec::defect()),
                             StrategyAutomaton::compile(grim_c), params)
                    .payoff.v1;
      worst_gap = std::max(worst_gap, std::abs(cf - ev));
    }
  }
  c.require(worst_gap <= 1e-9, "gain formula mismatch " + fmt(worst_gap));
  if (c.pass) c.details << "190 configurations, max gain-formula deviation "
                        << fmt(worst_gap);
}

// --- 6. discount threshold for the grim shooting-window profile ------------
void criterion_gamma_threshold(Check& c) {
  SplitMix64 rng(0x5EED0006ull);
  for (int k = 1; k <= 8; ++k) {
    for (int i = 0; i < 10; ++i) {
      const double p1 = uniform_in(rng, 0.1, 0.9);
      const double p2 = uniform_in(rng, 0.1, 0.9);
      try {
        const double g0 = find_gamma0(k, p1, p2, 1e-6);
        c.require(g0 >= 0.0 && g0 < 1.0,
                  "threshold out of range at K=" + std::to_string(k));
      } catch (const InconsistencyError& e) {
        c.require(false, std::string("K=") + std::to_string(k) + ": " + e.what());
      }
      // gamma -> 1 limit of the skip deviation gap: double route against
      // exact rational evaluation, and against the exact finite-gamma gap
      // just below 1 (the gap approaches its limit linearly in 1-gamma).
      const double cf = early_shoot_skip_limit_gain(k, p1, p2);
      const Rational exact = formula::early_shoot_skip_limit_gain(
          Rational(p1), Rational(p2), k);
      c.require(std::abs(cf - to_double(exact)) <= 1e-12,
                "limit-gain routes disagree at K=" + std::to_string(k));
      const Rational g_near_one = 1 - rational(1, 1LL << 27);
      Rational near_gap;
      bool first = true;
      for (int l = 1; l <= k; ++l) {
        const Rational gl = formula::early_shoot_skip_gap(
            g_near_one, Rational(p1), Rational(p2), k, l);
        if (first || gl < near_gap) near_gap = gl, first = false;
      }
      c.require(std::abs(to_double(near_gap) - cf) <= 1e-5,
                "finite-gamma gap does not approach the stated limit at K=" +
                    std::to_string(k));
    }
  }
  if (c.pass) c.details << "K=1..8 x 10 hit-probability pairs";
}

// --- 7. grim late-shooting profiles are refuted ----------------------------
void criterion_grim_late_shoot(Check& c) {
  SplitMix64 rng(0x5EED0007ull);
  std::vector<std::pair<double, double>> ps;
  for (int i = 0; i < 10; ++i)
    ps.emplace_back(uniform_in(rng, 0.05, 0.95), uniform_in(rng, 0.05, 0.95));

  // The target here is a NotNE verdict for every K in 1..8 over the whole
  // grid. Two corners cannot comply: K=1 (a shoot-from-round-1 schedule
  // equals always-shoot, which is an equilibrium) and configurations where
  // the true deviation gain gamma^K p1 p2 / (1 - gamma q1 q2) falls below
  // the certification epsilon (small gamma, large K). Both are reported.
  bool k1_ne_seen = false;
  int sub_epsilon_ne = 0;
  int refuted = 0;
  for (int k = 1; k <= 8; ++k) {
    const auto spec = StrategySpec::late_shoot(k, true);
    for (const auto& [p1, p2] : ps) {
      for (int j = 1; j <= 19; ++j) {
        const GameParams params(0.05 * j, p1, p2);
        const double expected = -late_shoot_early_onset_gain(params, k);
        const auto cert = check_ne(spec, spec, params, 1e-9);
        if (cert.ne) {
          if (k == 1) {
            k1_ne_seen = true;
          } else if (expected <= 1e-8) {
            ++sub_epsilon_ne;  // epsilon-certification correctly accepts
          } else {
            c.require(false, "K=" + std::to_string(k) +
                                 " certified as an equilibrium at gamma=" +
                                 fmt(params.gamma) + " despite gain " +
                                 fmt(expected));
          }
          continue;
        }
        ++refuted;
        if (!cert.witness) {
          c.require(false, "NotNE without witness at K=" + std::to_string(k));
          continue;
        }
        // The deviation gain is symmetric in the players, so no reorientation
        // of the closed form is needed for a player-2 witness.
        if (expected > 2e-9 &&
            std::abs(cert.witness->gain - expected) > 1e-9)
          c.require(false, "K=" + std::to_string(k) + " witness gain " +
                               fmt(cert.witness->gain) + " != " +
                               fmt(expected) + " at gamma=" +
                               fmt(params.gamma));
      }
    }
  }
  c.require(!k1_ne_seen,
            "K=1 is certified as an equilibrium: shooting from round 1 equals "
            "always-shoot, a known equilibrium, so the demanded K=1 refutation "
            "cannot hold");
  c.require(sub_epsilon_ne == 0,
            std::to_string(sub_epsilon_ne) +
                " small-gamma/large-K configurations have deviation gain below "
                "epsilon=1e-9 and are correctly epsilon-certified instead of "
                "refuted");
  if (c.pass)
    c.details << refuted << " configurations refuted with matching witness gains";
  else
    c.details << " [" << refuted
              << " configurations were refuted with witness gains matching the "
                 "closed form]";
}

// --- 8. periodic grim profiles around the canonical center -----------------
void criterion_periodic_center(Check& c) {
  const double h11 = h1_center(1);
  // Reference value confirmed by two independent routes; the analysis this
  // reproduces prints the same digits with a misplaced decimal point.
  c.require(std::abs(h11 - 0.060703) <= 1e-4,
            "h1(1) = " + fmt(h11) + ", expected 0.060703");
  const double h22 = h2_center(2);
  c.require(std::abs(h22 - 0.064222) <= 1e-5,
            "h2(2) = " + fmt(h22) + ", expected 0.064222");
  for (int m = 2; m <= 50; ++m) {
    const double h1m = h1_center(m);
    const double h2m = h2_center(m);
    c.require(h1m > h2m && h2m > 0.0,
              "ordering h1 > h2 > 0 fails at M=" + std::to_string(m));
  }
  for (int m = 1; m <= 12; ++m) {
    try {
      const auto scan = periodic_region_scan(m, 5, 0.01);
      c.require(scan.center_ne,
                "center point not an equilibrium at M=" + std::to_string(m));
      c.require(scan.empirical_delta > 0.0,
                "no verified box at M=" + std::to_string(m));
    } catch (const InconsistencyError& e) {
      c.require(false, std::string("M=") + std::to_string(m) + ": " + e.what());
    }
  }
  if (c.pass)
    c.details << "h1(1)=" << fmt(h11) << ", h2(2)=" << fmt(h22)
              << ", boxes verified for M=1..12";
}

// --- 9. cooperation gap identity -------------------------------------------
void criterion_cooperation_gap(Check& c) {
  SplitMix64 rng(0x5EED0009ull);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const GameParams params(uniform_in(rng, 0.02, 0.98),
                            uniform_in(rng, 0.01, 0.99),
                            uniform_in(rng, 0.01, 0.99));
    const auto vc =
        exact_payoff(StrategySpec::cooperate(), StrategySpec::cooperate(), params)
            .payoff;
    const auto vd =
        exact_payoff(StrategySpec::defect(), StrategySpec::defect(), params)
            .payoff;
    for (int player = 1; player <= 2; ++player) {
      const double gap = cooperation_gap(params, player);
      const double ev = player == 1 ? vc.V1 - vd.V1 : vc.V2 - vd.V2;
      worst = std::max(worst, std::abs(gap - ev));
      c.require(gap > 0.0, "non-positive gap at gamma=" + fmt(params.gamma));
    }
  }
  c.require(worst <= 1e-9, "max |closed form - evaluator| = " + fmt(worst));
  if (c.pass) c.details << "1000 tuples, max deviation " << fmt(worst);
}

// --- 10. Monte Carlo soundness ----------------------------------------------
void criterion_monte_carlo(Check& c) {
  const GameParams params(0.5, 0.5, 0.5);
  const auto d = StrategySpec::defect();
  const auto run1 = mc_payoff(d, d, params, 1'000'000, 42);
  const auto run2 = mc_payoff(d, d, params, 1'000'000, 42);
  const auto serial = mc_payoff_serial(d, d, params, 1'000'000, 42);
  const double exact = 5.0 / 7.0;
  c.require(std::abs(run1.estimate.v1 - exact) <= 4.0 * run1.stderr1,
            "estimate " + fmt(run1.estimate.v1) + " off 5/7 by more than 4 SE");
  c.require(run1.estimate.v1 == run2.estimate.v1 &&
                run1.estimate.v2 == run2.estimate.v2 &&
                run1.stderr1 == run2.stderr1 && run1.stderr2 == run2.stderr2,
            "rerun with the same seed is not bit-identical");
  c.require(run1.estimate.v1 == serial.estimate.v1 &&
                run1.estimate.v2 == serial.estimate.v2,
            "parallel and serial paths disagree");
  if (c.pass)
    c.details << "v1 = " << fmt(run1.estimate.v1) << " vs 5/7, stderr "
              << fmt(run1.stderr1) << ", bit-identical reruns";
}

}  // namespace

std::vector<CriterionResult> run_verification() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> table{
      {"stationary closed form matches evaluator", criterion_stationary_oracle},
      {"family closed forms match evaluator", criterion_family_oracle},
      {"degeneration identities hold exactly", criterion_degeneration},
      {"stationary equilibria are the two corners", criterion_stationary_scan},
      {"grim never-shoot profile is an equilibrium", criterion_grim_cooperate},
      {"discount threshold exists for shooting-window profiles",
       criterion_gamma_threshold},
      {"grim late-shooting profiles are refuted", criterion_grim_late_shoot},
      {"periodic grim profiles certified around center", criterion_periodic_center},
      {"cooperation gap identity", criterion_cooperation_gap},
      {"Monte Carlo soundness", criterion_monte_carlo},
  };

  std::vector<CriterionResult> results;
  int id = 0;
  for (const auto& [name, fn] : table) {
    CriterionResult r;
    r.id = ++id;
    r.name = name;
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("unexpected error: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    r.pass = check.pass;
    r.details = check.details.str();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace duel
