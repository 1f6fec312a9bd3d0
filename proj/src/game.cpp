#include "duel/game.hpp"

#include <cmath>

namespace duel {

const char* to_string(GameState s) {
  switch (s) {
    case GameState::BothAlive: return "both-alive";
    case GameState::OnlyP1: return "only-p1";
    case GameState::OnlyP2: return "only-p2";
    case GameState::BothDead: return "both-dead";
    case GameState::Terminal: return "terminal";
  }
  return "?";
}

bool is_alive(GameState state, int player) {
  switch (state) {
    case GameState::BothAlive: return true;
    case GameState::OnlyP1: return player == 1;
    case GameState::OnlyP2: return player == 2;
    default: return false;
  }
}

std::vector<int> legal_actions(GameState state, int player) {
  if (state == GameState::BothAlive) return {0, 1};
  (void)player;
  return {0};
}

namespace {

void check_legal(GameState state, ActionPair a) {
  if (a.f1 != 0 && a.f1 != 1) throw std::invalid_argument("f1 must be 0 or 1");
  if (a.f2 != 0 && a.f2 != 1) throw std::invalid_argument("f2 must be 0 or 1");
  if (state != GameState::BothAlive && (a.f1 == 1 || a.f2 == 1))
    throw std::invalid_argument(std::string("shooting is illegal from state ") +
                                to_string(state));
}

}  // namespace

StateDistribution transition(GameState state, ActionPair actions,
                             const GameParams& params) {
  check_legal(state, actions);
  if (state != GameState::BothAlive) return {{GameState::Terminal, 1.0}};

  const double kill1 = actions.f1 ? params.p1 : 0.0;  // P1 kills P2
  const double kill2 = actions.f2 ? params.p2 : 0.0;  // P2 kills P1

  StateDistribution d;
  auto push = [&d](GameState s, double p) {
    if (p > 0.0) d.push_back({s, p});
  };
  push(GameState::BothAlive, (1.0 - kill1) * (1.0 - kill2));
  push(GameState::OnlyP1, kill1 * (1.0 - kill2));
  push(GameState::OnlyP2, kill2 * (1.0 - kill1));
  push(GameState::BothDead, kill1 * kill2);
  return d;
}

double stage_payoff(GameState state, int player, const GameParams& params) {
  switch (state) {
    case GameState::BothAlive: return 1.0;
    case GameState::OnlyP1: return player == 1 ? 1.0 / (1.0 - params.gamma) : 0.0;
    case GameState::OnlyP2: return player == 2 ? 1.0 / (1.0 - params.gamma) : 0.0;
    default: return 0.0;
  }
}

std::pair<double, double> discounted_history_payoff(
    std::span<const GameState> history, const GameParams& params) {
  // Admissible successors: BothAlive -> any non-Terminal state;
  // just-died states -> Terminal only; Terminal -> Terminal.
  for (std::size_t i = 0; i + 1 < history.size(); ++i) {
    const GameState cur = history[i];
    const GameState nxt = history[i + 1];
    bool ok;
    if (cur == GameState::BothAlive)
      ok = nxt != GameState::Terminal;
    else
      ok = nxt == GameState::Terminal;
    if (!ok)
      throw std::invalid_argument(
          std::string("inadmissible history step ") + to_string(cur) + " -> " +
          to_string(nxt) + " at t=" + std::to_string(i + 1));
  }
  double q1 = 0.0, q2 = 0.0, disc = 1.0;
  for (const GameState s : history) {
    q1 += disc * stage_payoff(s, 1, params);
    q2 += disc * stage_payoff(s, 2, params);
    disc *= params.gamma;
  }
  return {q1, q2};
}

}  // namespace duel
