#pragma once

#include <cstdint>
#include <vector>

#include "duel/closed_form.hpp"
#include "duel/game.hpp"
#include "duel/strategy.hpp"

namespace duel {

// Exact expected payoff of an automaton-vs-automaton profile.
//
// The product chain (both-alive, memory1, memory2) is finite: memories are
// clock-plus-trigger pairs and the only branching comes from mixed emissions
// and grim observation of realized actions. The expectation therefore solves
// a finite linear fixed point, which we do directly; no truncation is
// involved and tail_bound is 0.
struct DPResult {
  PayoffPair payoff;
  long horizon = 0;       // longest transient depth of the product chain
  double tail_bound = 0;  // always 0: the fixed point is solved exactly
};

DPResult exact_payoff(const StrategyAutomaton& a1, const StrategyAutomaton& a2,
                      const GameParams& params, double tolerance = 1e-12);
DPResult exact_payoff(const StrategySpec& s1, const StrategySpec& s2,
                      const GameParams& params, double tolerance = 1e-12);

// Seeded Monte Carlo estimate of the same expectation. Deterministic given
// (seed, episodes, specs, params, max_rounds): every episode owns a
// counter-derived RNG stream, so results do not depend on thread scheduling.
struct MCResult {
  PayoffPair estimate;
  long long episodes = 0;
  double stderr1 = 0.0;  // standard error of the normalized estimate, player 1
  double stderr2 = 0.0;
  std::uint64_t seed = 0;
  long long max_rounds = 0;
};

// max_rounds = 0 picks the smallest horizon T with gamma^T/(1-gamma) < 1e-12,
// capped at 10^6. Episodes still alive at the horizon receive the exact
// continuation value of their current product state, removing truncation bias.
MCResult mc_payoff(const StrategySpec& s1, const StrategySpec& s2,
                   const GameParams& params, long long episodes,
                   std::uint64_t seed, long long max_rounds = 0);

// Serial reference for the OpenMP path above; must produce bit-identical
// results. Kept for testing and benchmarking.
MCResult mc_payoff_serial(const StrategySpec& s1, const StrategySpec& s2,
                          const GameParams& params, long long episodes,
                          std::uint64_t seed, long long max_rounds = 0);

long long default_max_rounds(double gamma);

// Counter-based RNG used by the Monte Carlo kernels and tests.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t s) : state(s) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace duel
