#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace duel {

// Thrown when two independent computation routes disagree (or a certified
// property fails to hold). Distinct from plain validation errors so the CLI
// can map it to its own exit code.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Discount factor and per-player hit probabilities. All three are open-interval
// quantities; the model breaks down at the endpoints.
struct GameParams {
  double gamma;
  double p1;
  double p2;

  GameParams(double gamma_, double p1_, double p2_)
      : gamma(gamma_), p1(p1_), p2(p2_) {
    validate();
  }

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0))
      throw std::invalid_argument("gamma must lie in (0,1), got " +
                                  std::to_string(gamma));
    if (!(p1 > 0.0 && p1 < 1.0) || !(p2 > 0.0 && p2 < 1.0))
      throw std::invalid_argument("hit probabilities must lie in (0,1)");
  }

  double hit(int player) const { return player == 1 ? p1 : p2; }

  GameParams swapped() const { return GameParams(gamma, p2, p1); }
};

// Five-point state space. BothAlive is the only state with live choices;
// the three just-died states pay out once and collapse into Terminal.
enum class GameState : std::uint8_t {
  BothAlive,   // (1,1)
  OnlyP1,      // (1,0): P2 died this round
  OnlyP2,      // (0,1): P1 died this round
  BothDead,    // (0,0)
  Terminal,    // absorbing
};

const char* to_string(GameState s);

struct ActionPair {
  int f1;  // 0 or 1
  int f2;
};

struct StateProbability {
  GameState state;
  double prob;
};

// Sparse distribution over successor states.
using StateDistribution = std::vector<StateProbability>;

// Actions a player may take from `state`. Shooting is only available to a
// live player facing a live opponent; a lone survivor has no target.
std::vector<int> legal_actions(GameState state, int player);

bool is_alive(GameState state, int player);

// One-step transition kernel. Shots from BothAlive are independent Bernoulli
// trials; every just-died state collapses to Terminal; Terminal is absorbing.
// Throws std::invalid_argument on an illegal action pair.
StateDistribution transition(GameState state, ActionPair actions,
                             const GameParams& params);

// Per-round reward q_n(s): 1 while both live, 1/(1-gamma) to a lone survivor
// (the whole future compressed into one lump), 0 otherwise.
double stage_payoff(GameState state, int player, const GameParams& params);

// Discounted sum over a finite state sequence starting at t=0. The sequence
// must be structurally admissible (post-death states must be Terminal);
// inadmissible sequences are rejected. Any tail beyond the last element is
// the caller's business.
std::pair<double, double> discounted_history_payoff(
    std::span<const GameState> history, const GameParams& params);

}  // namespace duel
