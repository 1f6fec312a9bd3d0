#include "duel/equilibrium.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

#include "duel/rational.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace duel {

namespace {

double self_hit(const GameParams& params, int player) {
  return player == 1 ? params.p1 : params.p2;
}
double opp_hit(const GameParams& params, int player) {
  return player == 1 ? params.p2 : params.p1;
}

}  // namespace

StationaryBestResponse best_response_stationary(double opponent_x,
                                                const GameParams& params,
                                                int player) {
  if (!(opponent_x >= 0.0 && opponent_x <= 1.0))
    throw std::invalid_argument("opponent_x must be in [0,1]");
  const double ps = self_hit(params, player);
  const double po = opp_hit(params, player);
  if (opponent_x == 0.0) {
    // Every response earns the full normalized payoff of 1; resolve the tie
    // toward not shooting.
    return {0.0, 1.0, true};
  }
  const double value =
      formula::v1_stationary(params.gamma, ps, po, 1.0, opponent_x);
  return {1.0, value, false};
}

AutomatonBestResponse best_response_vs_automaton(const StrategyAutomaton& opponent,
                                                 const GameParams& params,
                                                 double epsilon, int player) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const double g = params.gamma;
  const double ps = self_hit(params, player);
  const double po = opp_hit(params, player);
  const double survivor = 1.0 / (1.0 - g);
  const int n = opponent.memory_count();

  // Opponent action support and successor memories per (memory, own action).
  struct Arm {
    double reward;            // immediate expected lump from lone survival
    double weight[2];         // continuation mass toward succ[2]
    int succ[2];
    int count;
  };
  std::vector<Arm> arms(static_cast<std::size_t>(n) * 2);
  for (int id = 0; id < n; ++id) {
    const auto mem = opponent.memory_at(id);
    const double x2 = opponent.emit(mem);
    for (int a1 = 0; a1 <= 1; ++a1) {
      Arm arm{};
      arm.count = 0;
      arm.reward = 0.0;
      for (int a2 = 0; a2 <= 1; ++a2) {
        const double pa2 = a2 == 1 ? x2 : 1.0 - x2;
        if (pa2 <= 0.0) continue;
        const double kill_self = a1 ? ps : 0.0;
        const double kill_opp = a2 ? po : 0.0;
        arm.reward += pa2 * kill_self * (1.0 - kill_opp) * survivor;
        const double cont = pa2 * (1.0 - kill_self) * (1.0 - kill_opp);
        const auto succ = opponent.advance(mem, /*own=*/a2, /*opponent=*/a1);
        arm.succ[arm.count] = opponent.index(succ);
        arm.weight[arm.count] = cont;
        ++arm.count;
      }
      arms[static_cast<std::size_t>(id) * 2 + a1] = arm;
    }
  }

  const auto arm_value = [&](const std::vector<double>& w, int id, int a1) {
    const Arm& arm = arms[static_cast<std::size_t>(id) * 2 + a1];
    double q = 1.0 + g * arm.reward;
    for (int i = 0; i < arm.count; ++i) q += g * arm.weight[i] * w[arm.succ[i]];
    return q;
  };

  AutomatonBestResponse out;
  std::vector<double> w(n, survivor), next(n);
  const double threshold =
      std::max(epsilon * (1.0 - g) / (2.0 * g), 1e-15 * survivor);
  const int max_sweeps = 10'000'000 / std::max(1, n) + 1000;
  double residual = 0.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    residual = 0.0;
    for (int id = 0; id < n; ++id) {
      const double q = std::max(arm_value(w, id, 0), arm_value(w, id, 1));
      residual = std::max(residual, std::abs(q - w[id]));
      next[id] = q;
    }
    w.swap(next);
    out.residuals.push_back(residual);
    ++out.sweeps;
    if (residual < threshold) break;
  }
  if (residual >= threshold)
    throw InconsistencyError("value iteration failed to converge");

  // Greedy policy, ties resolved toward not shooting, then exact evaluation.
  out.policy.resize(n);
  for (int id = 0; id < n; ++id) {
    const double q0 = arm_value(w, id, 0);
    const double q1 = arm_value(w, id, 1);
    out.policy[id] = q1 > q0 + 1e-12 * (1.0 + std::abs(q0)) ? 1 : 0;
  }

  Eigen::SparseMatrix<double> A(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd b(n);
  for (int id = 0; id < n; ++id) {
    const Arm& arm = arms[static_cast<std::size_t>(id) * 2 + out.policy[id]];
    b[id] = 1.0 + g * arm.reward;
    double diag = 1.0;
    for (int i = 0; i < arm.count; ++i) {
      if (arm.succ[i] == id)
        diag -= g * arm.weight[i];
      else
        trips.emplace_back(id, arm.succ[i], -g * arm.weight[i]);
    }
    trips.emplace_back(id, id, diag);
  }
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw InconsistencyError("policy evaluation system failed to factorize");
  const Eigen::VectorXd wpol = lu.solve(b);
  out.value = (1.0 - g) * wpol[opponent.index(opponent.initial())];
  return out;
}

namespace {

struct Candidate {
  std::string description;
  StrategyAutomaton automaton;
};

std::vector<Candidate> structured_deviations(const StrategySpec& base) {
  std::vector<Candidate> out;
  const auto sched = [](std::vector<double> prefix, std::vector<double> cycle) {
    return StrategyAutomaton::from_schedule(std::move(prefix), std::move(cycle));
  };
  out.push_back({"always shoot", sched({}, {1.0})});
  out.push_back({"never shoot", sched({}, {0.0})});

  const int k = base.param;
  switch (base.kind) {
    case StrategyKind::EarlyShoot: {
      if (k >= 1)
        out.push_back({"stop shooting one round early",
                       sched(std::vector<double>(k - 1, 1.0), {0.0})});
      out.push_back({"keep shooting one extra round",
                     sched(std::vector<double>(k + 1, 1.0), {0.0})});
      for (int skip = 1; skip <= k; ++skip) {
        std::vector<double> prefix(skip, 1.0);
        prefix[skip - 1] = 0.0;
        out.push_back({"skip the shot at round " + std::to_string(skip) +
                           ", then always shoot",
                       sched(std::move(prefix), {1.0})});
      }
      break;
    }
    case StrategyKind::LateShoot: {
      if (k >= 2)
        out.push_back({"start shooting one round early (round " +
                           std::to_string(k - 1) + ")",
                       sched(std::vector<double>(k - 2, 0.0), {1.0})});
      out.push_back({"start shooting one round late (round " +
                         std::to_string(k + 1) + ")",
                     sched(std::vector<double>(k, 0.0), {1.0})});
      break;
    }
    case StrategyKind::Periodic: {
      for (int early = 0; early < k; ++early)
        out.push_back({"shoot at round " + std::to_string(early + 1) +
                           " of the first period, then always shoot",
                       sched(std::vector<double>(early, 0.0), {1.0})});
      out.push_back({"skip the scheduled shot at round " +
                         std::to_string(k + 1) + ", then always shoot",
                     sched(std::vector<double>(k + 1, 0.0), {1.0})});
      break;
    }
    case StrategyKind::Defect:
      out.push_back({"skip the shot at round 1, then always shoot",
                     sched({0.0}, {1.0})});
      break;
    default:
      break;
  }
  return out;
}

}  // namespace

NECertificate check_ne(const StrategySpec& s1, const StrategySpec& s2,
                       const GameParams& params, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const auto a1 = StrategyAutomaton::compile(s1);
  const auto a2 = StrategyAutomaton::compile(s2);
  const DPResult base = exact_payoff(a1, a2, params);

  NECertificate cert;
  cert.spec1 = s1;
  cert.spec2 = s2;
  cert.epsilon = epsilon;
  cert.on_path = base.payoff;

  const AutomatonBestResponse br1 =
      best_response_vs_automaton(a2, params, epsilon, 1);
  const AutomatonBestResponse br2 =
      best_response_vs_automaton(a1, params, epsilon, 2);
  cert.gain1 = br1.value - base.payoff.v1;
  cert.gain2 = br2.value - base.payoff.v2;
  cert.ne = cert.gain1 <= epsilon && cert.gain2 <= epsilon;
  if (cert.ne) return cert;

  // Populate an interpretable witness for the player with the larger gain.
  const int player = cert.gain1 >= cert.gain2 ? 1 : 2;
  const double mdp_gain = player == 1 ? cert.gain1 : cert.gain2;
  const StrategySpec& own = player == 1 ? s1 : s2;
  const StrategyAutomaton& opp = player == 1 ? a2 : a1;
  const double on_path_value = player == 1 ? base.payoff.v1 : base.payoff.v2;

  double best_gain = -1e300;
  std::string best_desc;
  for (auto& cand : structured_deviations(own)) {
    const DPResult dev = player == 1 ? exact_payoff(cand.automaton, opp, params)
                                     : exact_payoff(opp, cand.automaton, params);
    const double v = player == 1 ? dev.payoff.v1 : dev.payoff.v2;
    const double gain = v - on_path_value;
    if (gain > best_gain) {
      best_gain = gain;
      best_desc = cand.description;
    }
  }
  // A structured deviation can never beat the MDP optimum.
  if (best_gain > mdp_gain + 1e-8)
    throw InconsistencyError(
        "structured deviation outperforms the MDP best response: " + best_desc);

  DeviationReport report;
  report.player = player;
  report.baseline = base.payoff;
  if (best_gain > epsilon) {
    report.description = best_desc;
    report.gain = best_gain;
  } else {
    report.description = "mdp-best-response policy";
    report.gain = mdp_gain;
  }
  cert.witness = report;
  return cert;
}

std::vector<std::pair<double, double>> stationary_ne_scan(
    const GameParams& params, int grid_resolution, double epsilon) {
  if (grid_resolution < 2)
    throw std::invalid_argument("grid_resolution must be >= 2");
  const int r = grid_resolution;
  const double g = params.gamma, p1 = params.p1, p2 = params.p2;
  std::vector<char> pass(static_cast<std::size_t>(r) * r, 0);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < r * r; ++i) {
    const double x1 = static_cast<double>(i / r) / (r - 1);
    const double x2 = static_cast<double>(i % r) / (r - 1);
    const double v1 = formula::v1_stationary(g, p1, p2, x1, x2);
    const double v2 = formula::v1_stationary(g, p2, p1, x2, x1);
    // The payoff is monotone in the deviating probability, so endpoint
    // deviations realize the extremes.
    double gain1 = -1e300, gain2 = -1e300;
    for (const double y : {0.0, 1.0}) {
      gain1 = std::max(gain1, formula::v1_stationary(g, p1, p2, y, x2) - v1);
      gain2 = std::max(gain2, formula::v1_stationary(g, p2, p1, y, x1) - v2);
    }
    pass[static_cast<std::size_t>(i)] = gain1 <= epsilon && gain2 <= epsilon;
  }

  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < r * r; ++i)
    if (pass[static_cast<std::size_t>(i)])
      out.emplace_back(static_cast<double>(i / r) / (r - 1),
                       static_cast<double>(i % r) / (r - 1));
  return out;
}

double find_gamma0(int k, double p1, double p2, double tolerance) {
  if (k < 1) throw std::invalid_argument("K must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (!(p1 > 0.0 && p1 < 1.0) || !(p2 > 0.0 && p2 < 1.0))
    throw std::invalid_argument("hit probabilities must lie in (0,1)");

  const auto profile = StrategyAutomaton::compile(StrategySpec::early_shoot(k, true));
  std::vector<StrategyAutomaton> deviations;
  for (int skip = 1; skip <= k; ++skip) {
    std::vector<double> prefix(skip, 1.0);
    prefix[skip - 1] = 0.0;
    deviations.push_back(StrategyAutomaton::from_schedule(std::move(prefix), {1.0}));
  }

  // Minimum over skip rounds of the normalized compliance-minus-deviation
  // gap. The gap shrinks like gamma^K near 0, far below double noise for
  // larger K, so the sign is decided in exact rational arithmetic; the
  // evaluator-based double route must agree with the closed form to 1e-9.
  const Rational rp1(p1), rp2(p2);  // exact binary values of the inputs
  const auto gap_positive = [&](double gamma) {
    const GameParams params(gamma, p1, p2);
    const double base = exact_payoff(profile, profile, params).payoff.v1;
    const Rational rg(gamma);
    bool positive = true;
    for (int skip = 1; skip <= k; ++skip) {
      const double dp_gap =
          base -
          exact_payoff(deviations[static_cast<std::size_t>(skip - 1)], profile,
                       params)
              .payoff.v1;
      const Rational exact =
          formula::early_shoot_skip_gap(rg, rp1, rp2, k, skip);
      // The linear solve loses ~1e-16/(1-gamma) of absolute accuracy on the
      // normalized payoff as gamma -> 1; widen the agreement band accordingly.
      const double band = std::max(1e-9, 1e-12 / (1.0 - gamma));
      if (std::abs(dp_gap - to_double(exact)) > band)
        throw InconsistencyError(
            "skip-deviation gap: evaluator and closed form disagree");
      if (!(exact > 0)) positive = false;
    }
    return positive;
  };

  constexpr int kScanPoints = 200;
  constexpr double kTop = 1.0 - 1e-7;
  double lo = 0.0;  // highest known non-positive point (0 if none)
  bool found_nonpositive = false;
  double hi = kTop;
  for (int j = kScanPoints; j >= 1; --j) {
    const double gamma = static_cast<double>(j) / (kScanPoints + 1);
    if (!gap_positive(gamma)) {
      lo = gamma;
      found_nonpositive = true;
      break;
    }
    hi = gamma;
  }

  double gamma0 = 0.0;
  if (found_nonpositive) {
    if (!gap_positive(hi))
      throw InconsistencyError(
          "no positive deviation gap found near gamma=1; this contradicts the "
          "positive gamma->1 limit");
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (!gap_positive(mid))
        lo = mid;
      else
        hi = mid;
    }
    gamma0 = hi;
  }

  // Post-condition: the gap is positive on a 100-point sample of (gamma0, 1).
  for (int i = 1; i <= 100; ++i) {
    const double gamma = gamma0 + (kTop - gamma0) * i / 101.0;
    if (!gap_positive(gamma))
      throw InconsistencyError(
          "deviation gap fails to stay positive above the reported threshold");
  }
  return gamma0;
}

RegionScan periodic_region_scan(int m, int grid_resolution,
                                double half_width_max) {
  if (m < 1) throw std::invalid_argument("M must be >= 1");
  if (grid_resolution < 2)
    throw std::invalid_argument("grid_resolution must be >= 2");
  if (!(half_width_max > 0.0))
    throw std::invalid_argument("half_width_max must be > 0");

  RegionScan scan;
  scan.m = m;
  scan.center_gamma = 0.9;
  scan.center_p = (1.0 - std::exp(-static_cast<double>(m))) / 10.0;

  const GameParams center(scan.center_gamma, scan.center_p, scan.center_p);
  const auto cert = check_ne(StrategySpec::periodic(m, true),
                             StrategySpec::periodic(m, true), center, 1e-9);
  scan.center_ne = cert.ne;
  if (!cert.ne)
    throw InconsistencyError(
        "periodic profile fails the equilibrium check at its center point, "
        "M=" + std::to_string(m));

  const auto evaluate_box = [&](double delta, std::vector<RegionScanPoint>& grid) {
    const int r = grid_resolution;
    grid.assign(static_cast<std::size_t>(r) * r * r, {});
    bool all_positive = true;
#pragma omp parallel for schedule(static)
    for (int idx = 0; idx < r * r * r; ++idx) {
      const int ig = idx / (r * r), ip1 = (idx / r) % r, ip2 = idx % r;
      const auto coord = [&](double c, int i) {
        return c - delta + 2.0 * delta * i / (r - 1);
      };
      RegionScanPoint pt;
      pt.gamma = coord(scan.center_gamma, ig);
      pt.p1 = coord(scan.center_p, ip1);
      pt.p2 = coord(scan.center_p, ip2);
      const GameParams params(pt.gamma, pt.p1, pt.p2);
      pt.min_gain = 1e300;
      for (int early = 0; early <= m - 1; ++early)
        pt.min_gain =
            std::min(pt.min_gain, periodic_early_shot_gain(params, m, early));
      grid[static_cast<std::size_t>(idx)] = pt;
    }
    for (const auto& pt : grid)
      if (!(pt.min_gain > 0.0)) all_positive = false;
    return all_positive;
  };

  // Largest half-width that keeps the box inside the parameter domain.
  double delta = std::min({half_width_max, 1.0 - scan.center_gamma - 1e-6,
                           scan.center_p - 1e-6});
  scan.empirical_delta = 0.0;
  std::vector<RegionScanPoint> grid;
  while (delta >= 1e-6) {
    if (evaluate_box(delta, grid)) {
      scan.empirical_delta = delta;
      scan.grid = std::move(grid);
      return scan;
    }
    delta *= 0.5;
  }
  scan.grid = std::move(grid);
  return scan;
}

}  // namespace duel
