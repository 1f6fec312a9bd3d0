#pragma once

#include <string>
#include <vector>

namespace duel {

// One reproduction criterion of the verification suite.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

// Runs the full verification suite (closed forms against independent oracles,
// equilibrium claims, Monte Carlo soundness). Deterministic: all randomness
// is drawn from fixed seeds.
std::vector<CriterionResult> run_verification();

}  // namespace duel
