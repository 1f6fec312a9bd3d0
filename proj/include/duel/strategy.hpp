#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace duel {

enum class StrategyKind {
  Stationary,   // shoot with fixed probability x every round
  Cooperate,    // never shoot
  Defect,       // always shoot
  EarlyShoot,   // shoot at rounds 1..K, then never
  LateShoot,    // shoot at rounds K, K+1, ...
  Periodic,     // shoot at rounds M+1, 2(M+1), ...
};

// Declarative description of a strategy family member. Canonical text forms:
//   C, D, x:0.3, DC:4, CD:4, P:3   with optional "grim-" prefix.
struct StrategySpec {
  StrategyKind kind = StrategyKind::Cooperate;
  double x = 0.0;    // Stationary only
  int param = 0;     // K for EarlyShoot/LateShoot, M for Periodic
  bool grim = false;

  void validate() const;  // throws std::invalid_argument

  static StrategySpec parse(std::string_view text);
  std::string to_string() const;

  static StrategySpec stationary(double x);
  static StrategySpec cooperate(bool grim = false);
  static StrategySpec defect(bool grim = false);
  static StrategySpec early_shoot(int k, bool grim = false);
  static StrategySpec late_shoot(int k, bool grim = false);
  static StrategySpec periodic(int m, bool grim = false);
};

// Finite executable form of a strategy: an eventually periodic emission
// schedule plus an absorbing trigger flag for grim variants.
//
// The clock counts rounds already played; emit() gives the shoot probability
// for the upcoming round. Grim variants compare the opponent's realized
// action against the base schedule's prescription and, on mismatch, emit 1
// from the next round on. Non-grim automata ignore observations entirely.
class StrategyAutomaton {
 public:
  struct Memory {
    int clock = 0;
    bool triggered = false;
    bool operator==(const Memory&) const = default;
  };

  // Emission e(t) for rounds t=1,2,... is prefix[t-1] while in range, then
  // cycle[(t-1-|prefix|) mod |cycle|]. Grim requires a deterministic schedule.
  static StrategyAutomaton from_schedule(std::vector<double> prefix,
                                         std::vector<double> cycle,
                                         bool grim = false);
  static StrategyAutomaton compile(const StrategySpec& spec);

  Memory initial() const { return {}; }
  double emit(Memory m) const;
  Memory advance(Memory m, int own_action, int opponent_action) const;

  // Dense indexing of the reachable memory set, for DP over product chains.
  int memory_count() const { return clock_count() * (grim_ ? 2 : 1); }
  int index(Memory m) const { return m.clock * (grim_ ? 2 : 1) + (m.triggered ? 1 : 0); }
  Memory memory_at(int idx) const;

  bool grim() const { return grim_; }
  bool deterministic() const { return deterministic_; }
  // True if every emission from this memory state onward is zero.
  bool silent_forever(Memory m) const;

 private:
  int clock_count() const {
    return static_cast<int>(prefix_.size() + cycle_.size());
  }
  double schedule_at(int clock) const;

  std::vector<double> prefix_;
  std::vector<double> cycle_;
  bool grim_ = false;
  bool deterministic_ = true;
};

}  // namespace duel
