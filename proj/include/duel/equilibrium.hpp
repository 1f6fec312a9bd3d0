#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duel/closed_form.hpp"
#include "duel/evaluator.hpp"
#include "duel/game.hpp"
#include "duel/strategy.hpp"

namespace duel {

// Best response of `player` to a stationary opponent shooting with
// probability opponent_x. Any positive opponent_x makes always-shoot the
// unique best response; a never-shooting opponent makes every response
// payoff-equivalent, reported as a tie resolved toward not shooting.
struct StationaryBestResponse {
  double x_star;
  double value;  // normalized
  bool tie;
};

StationaryBestResponse best_response_stationary(double opponent_x,
                                                const GameParams& params,
                                                int player = 1);

// epsilon-optimal best response of `player` against a fixed opponent
// automaton, by value iteration over (both-alive, opponent memory) followed
// by an exact evaluation of the greedy policy. The reported value is the
// greedy policy's exact value: a lower bound on the optimum, within epsilon
// of it.
struct AutomatonBestResponse {
  double value;                   // normalized
  std::vector<int> policy;        // shoot decision per opponent-memory index
  int sweeps = 0;
  std::vector<double> residuals;  // sup-norm change per sweep
};

AutomatonBestResponse best_response_vs_automaton(const StrategyAutomaton& opponent,
                                                 const GameParams& params,
                                                 double epsilon, int player = 1);

// Outcome of an epsilon-equilibrium check.
struct DeviationReport {
  int player;               // who gains by deviating
  std::string description;  // deviation class + onset round
  double gain;              // normalized payoff improvement
  PayoffPair baseline;      // on-path profile payoff
};

struct NECertificate {
  StrategySpec spec1, spec2;
  double epsilon;
  bool ne;          // no unilateral gain above epsilon
  double gain1;     // best-response gain of player 1 (may be ~0 or negative)
  double gain2;
  PayoffPair on_path;
  std::optional<DeviationReport> witness;  // present when ne is false
};

// Certifies or refutes the profile as an epsilon-NE. Gains come from the
// MDP best response; when the profile fails, the witness is drawn from the
// interpretable structured deviation classes (onset shifts, one-round skips,
// early shots) if one of them realizes a gain above epsilon.
NECertificate check_ne(const StrategySpec& s1, const StrategySpec& s2,
                       const GameParams& params, double epsilon);

// All stationary profiles on a uniform grid (including endpoints) where
// neither player can gain more than epsilon by a unilateral stationary
// deviation.
std::vector<std::pair<double, double>> stationary_ne_scan(
    const GameParams& params, int grid_resolution, double epsilon);

// Discount threshold above which the mutual shoot-through-K grim profile
// survives every skip-one-round deviation: the largest root in (0,1) of the
// minimum-over-skip-round deviation gap, located by bisection. Returns 0 when
// the gap is positive on all of (0,1). The positivity of the gap is
// re-verified at 100 points above the returned threshold.
double find_gamma0(int k, double p1, double p2, double tolerance);

// Empirical certification box around the canonical center point for the
// mutual period-(M+1) grim profile.
struct RegionScanPoint {
  double gamma, p1, p2;
  double min_gain;  // minimum over early-shot rounds of the deviation gap
};

struct RegionScan {
  int m;
  double center_gamma, center_p;
  double empirical_delta;  // largest verified box half-width (0 if none)
  bool center_ne;
  std::vector<RegionScanPoint> grid;  // grid of the last verified box
};

RegionScan periodic_region_scan(int m, int grid_resolution,
                                double half_width_max);

}  // namespace duel
