#include "duel/evaluator.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <queue>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace duel {

namespace {

constexpr std::size_t kMaxProductStates = 500'000;

// Finite product chain over (both-alive, memory1, memory2) with the absorbing
// payoffs folded into per-state rewards.
struct ProductChain {
  std::vector<std::pair<int, int>> states;  // (memory index 1, memory index 2)
  std::unordered_map<std::int64_t, int> ids;
  std::vector<double> value1;  // total expected payoff from each state
  std::vector<double> value2;
  long depth = 0;

  int id_of(int i1, int i2) const {
    const auto it = ids.find(key(i1, i2));
    return it == ids.end() ? -1 : it->second;
  }
  static std::int64_t key(int i1, int i2) {
    return (static_cast<std::int64_t>(i1) << 32) | static_cast<std::uint32_t>(i2);
  }
};

struct JointAction {
  int a1, a2;
  double prob;
};

void joint_actions(double x1, double x2, std::vector<JointAction>& out) {
  out.clear();
  const auto side = [](double x, int a) {
    return a == 1 ? x : 1.0 - x;
  };
  for (int a1 = 0; a1 <= 1; ++a1)
    for (int a2 = 0; a2 <= 1; ++a2) {
      const double p = side(x1, a1) * side(x2, a2);
      if (p > 0.0) out.push_back({a1, a2, p});
    }
}

ProductChain solve_chain(const StrategyAutomaton& a1, const StrategyAutomaton& a2,
                         const GameParams& params) {
  ProductChain chain;
  const auto add_state = [&chain, &a1, &a2](StrategyAutomaton::Memory m1,
                                            StrategyAutomaton::Memory m2) {
    const std::int64_t k = ProductChain::key(a1.index(m1), a2.index(m2));
    const auto it = chain.ids.find(k);
    if (it != chain.ids.end()) return it->second;
    const int id = static_cast<int>(chain.states.size());
    chain.ids.emplace(k, id);
    chain.states.emplace_back(a1.index(m1), a2.index(m2));
    return id;
  };

  // Breadth-first expansion of the reachable product states.
  std::vector<StrategyAutomaton::Memory> mem1{a1.initial()}, mem2{a2.initial()};
  std::vector<long> dist{0};
  add_state(a1.initial(), a2.initial());
  std::vector<JointAction> actions;
  std::queue<int> frontier;
  frontier.push(0);
  std::vector<std::vector<std::pair<int, double>>> edges;  // (succ, weight)
  std::vector<double> reward1, reward2;
  edges.resize(1);
  reward1.resize(1);
  reward2.resize(1);

  const double g = params.gamma;
  const double survivor = 1.0 / (1.0 - g);

  while (!frontier.empty()) {
    const int id = frontier.front();
    frontier.pop();
    const auto m1 = mem1[id];
    const auto m2 = mem2[id];
    joint_actions(a1.emit(m1), a2.emit(m2), actions);
    double r1 = 0.0, r2 = 0.0;
    for (const auto& ja : actions) {
      const double kill1 = ja.a1 ? params.p1 : 0.0;  // P1 kills P2
      const double kill2 = ja.a2 ? params.p2 : 0.0;
      r1 += ja.prob * kill1 * (1.0 - kill2) * survivor;
      r2 += ja.prob * kill2 * (1.0 - kill1) * survivor;
      const double cont = ja.prob * (1.0 - kill1) * (1.0 - kill2);
      if (cont <= 0.0) continue;
      const auto n1 = a1.advance(m1, ja.a1, ja.a2);
      const auto n2 = a2.advance(m2, ja.a2, ja.a1);
      const std::size_t before = chain.states.size();
      const int succ = add_state(n1, n2);
      if (chain.states.size() > before) {
        if (chain.states.size() > kMaxProductStates)
          throw std::invalid_argument(
              "profile product chain exceeds the supported state cap");
        mem1.push_back(n1);
        mem2.push_back(n2);
        dist.push_back(dist[id] + 1);
        edges.emplace_back();
        reward1.push_back(0.0);
        reward2.push_back(0.0);
        frontier.push(succ);
      }
      edges[id].emplace_back(succ, cont);
    }
    reward1[id] = r1;
    reward2[id] = r2;
    chain.depth = std::max(chain.depth, dist[id]);
  }

  // (I - g*W) V = 1 + g*r, one right-hand side per player.
  const int n = static_cast<int>(chain.states.size());
  Eigen::SparseMatrix<double> A(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double diag = 1.0;
    for (const auto& [succ, w] : edges[i]) {
      if (succ == i)
        diag -= g * w;
      else
        trips.emplace_back(i, succ, -g * w);
    }
    trips.emplace_back(i, i, diag);
  }
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw InconsistencyError("product-chain linear system failed to factorize");

  Eigen::VectorXd b1(n), b2(n);
  for (int i = 0; i < n; ++i) {
    b1[i] = 1.0 + g * reward1[i];
    b2[i] = 1.0 + g * reward2[i];
  }
  const Eigen::VectorXd v1 = lu.solve(b1);
  const Eigen::VectorXd v2 = lu.solve(b2);
  chain.value1.assign(v1.data(), v1.data() + n);
  chain.value2.assign(v2.data(), v2.data() + n);
  return chain;
}

}  // namespace

DPResult exact_payoff(const StrategyAutomaton& a1, const StrategyAutomaton& a2,
                      const GameParams& params, double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  const ProductChain chain = solve_chain(a1, a2, params);
  DPResult out;
  const double V1 = chain.value1[0];
  const double V2 = chain.value2[0];
  out.payoff = {(1.0 - params.gamma) * V1, (1.0 - params.gamma) * V2, V1, V2};
  out.horizon = chain.depth;
  out.tail_bound = 0.0;
  return out;
}

DPResult exact_payoff(const StrategySpec& s1, const StrategySpec& s2,
                      const GameParams& params, double tolerance) {
  return exact_payoff(StrategyAutomaton::compile(s1),
                      StrategyAutomaton::compile(s2), params, tolerance);
}

long long default_max_rounds(double gamma) {
  // smallest T with gamma^T/(1-gamma) < 1e-12
  const double t = std::ceil(std::log(1e-12 * (1.0 - gamma)) / std::log(gamma));
  return std::min<long long>(1'000'000, std::max<long long>(1, (long long)t));
}

namespace {

struct EpisodePayoff {
  double q1, q2;
};

EpisodePayoff run_episode(const StrategyAutomaton& a1, const StrategyAutomaton& a2,
                          const GameParams& params, long long max_rounds,
                          SplitMix64 rng, const ProductChain& tail) {
  const double g = params.gamma;
  const double survivor = 1.0 / (1.0 - g);
  auto m1 = a1.initial();
  auto m2 = a2.initial();
  double q1 = 1.0, q2 = 1.0, disc = 1.0;

  for (long long t = 1; t <= max_rounds; ++t) {
    disc *= g;
    const double x1 = a1.emit(m1);
    const double x2 = a2.emit(m2);
    // Draw order is fixed: action 1, action 2, hit 1, hit 2. Deterministic
    // emissions consume no randomness.
    const int f1 = x1 <= 0.0 ? 0 : (x1 >= 1.0 ? 1 : (rng.uniform() < x1 ? 1 : 0));
    const int f2 = x2 <= 0.0 ? 0 : (x2 >= 1.0 ? 1 : (rng.uniform() < x2 ? 1 : 0));
    const bool hit1 = f1 && rng.uniform() < params.p1;  // P1 kills P2
    const bool hit2 = f2 && rng.uniform() < params.p2;
    if (hit1 || hit2) {
      if (hit1 && !hit2) q1 += disc * survivor;
      if (hit2 && !hit1) q2 += disc * survivor;
      return {q1, q2};
    }
    q1 += disc;
    q2 += disc;
    m1 = a1.advance(m1, f1, f2);
    m2 = a2.advance(m2, f2, f1);
  }

  // Still both alive at the horizon: settle the remaining expectation
  // analytically from the current product state.
  const int id = tail.id_of(a1.index(m1), a2.index(m2));
  if (id < 0)
    throw InconsistencyError("episode reached a product state outside the "
                             "solved chain");
  q1 += disc * (tail.value1[id] - 1.0);
  q2 += disc * (tail.value2[id] - 1.0);
  return {q1, q2};
}

MCResult mc_impl(const StrategySpec& s1, const StrategySpec& s2,
                 const GameParams& params, long long episodes,
                 std::uint64_t seed, long long max_rounds, bool parallel) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (max_rounds == 0) max_rounds = default_max_rounds(params.gamma);
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");

  const auto a1 = StrategyAutomaton::compile(s1);
  const auto a2 = StrategyAutomaton::compile(s2);
  const ProductChain tail = solve_chain(a1, a2, params);

  std::vector<double> vals1(static_cast<std::size_t>(episodes));
  std::vector<double> vals2(static_cast<std::size_t>(episodes));
  const double norm = 1.0 - params.gamma;

  const auto body = [&](long long e) {
    // One independent counter-derived stream per episode index.
    SplitMix64 mixer(seed);
    mixer.state ^= 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(e + 1);
    SplitMix64 rng(mixer.next());
    const EpisodePayoff ep = run_episode(a1, a2, params, max_rounds, rng, tail);
    vals1[static_cast<std::size_t>(e)] = norm * ep.q1;
    vals2[static_cast<std::size_t>(e)] = norm * ep.q2;
  };

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long e = 0; e < episodes; ++e) body(e);
  } else {
    for (long long e = 0; e < episodes; ++e) body(e);
  }

  // Deterministic two-pass reduction, independent of thread count.
  double mean1 = 0.0, mean2 = 0.0;
  for (long long e = 0; e < episodes; ++e) {
    mean1 += vals1[static_cast<std::size_t>(e)];
    mean2 += vals2[static_cast<std::size_t>(e)];
  }
  mean1 /= static_cast<double>(episodes);
  mean2 /= static_cast<double>(episodes);
  double var1 = 0.0, var2 = 0.0;
  for (long long e = 0; e < episodes; ++e) {
    const double d1 = vals1[static_cast<std::size_t>(e)] - mean1;
    const double d2 = vals2[static_cast<std::size_t>(e)] - mean2;
    var1 += d1 * d1;
    var2 += d2 * d2;
  }
  if (episodes > 1) {
    var1 /= static_cast<double>(episodes - 1);
    var2 /= static_cast<double>(episodes - 1);
  }

  MCResult out;
  out.estimate = make_payoff_pair(mean1, mean2, params.gamma);
  out.episodes = episodes;
  out.stderr1 = std::sqrt(var1 / static_cast<double>(episodes));
  out.stderr2 = std::sqrt(var2 / static_cast<double>(episodes));
  out.seed = seed;
  out.max_rounds = max_rounds;
  return out;
}

}  // namespace

MCResult mc_payoff(const StrategySpec& s1, const StrategySpec& s2,
                   const GameParams& params, long long episodes,
                   std::uint64_t seed, long long max_rounds) {
  return mc_impl(s1, s2, params, episodes, seed, max_rounds, true);
}

MCResult mc_payoff_serial(const StrategySpec& s1, const StrategySpec& s2,
                          const GameParams& params, long long episodes,
                          std::uint64_t seed, long long max_rounds) {
  return mc_impl(s1, s2, params, episodes, seed, max_rounds, false);
}

}  // namespace duel
