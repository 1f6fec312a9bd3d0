#include "duel/closed_form.hpp"

#include <cmath>

namespace duel {

namespace {

void check_clock_param(int value, const char* what) {
  if (value > kMaxClockParam)
    throw std::invalid_argument(std::string(what) + " exceeds the supported cap of " +
                                std::to_string(kMaxClockParam));
}

}  // namespace

PayoffPair v_stationary(const GameParams& params, double x1, double x2) {
  if (!(x1 >= 0.0 && x1 <= 1.0) || !(x2 >= 0.0 && x2 <= 1.0))
    throw std::invalid_argument("shoot probabilities must be in [0,1]");
  const double v1 =
      formula::v1_stationary(params.gamma, params.p1, params.p2, x1, x2);
  const double v2 =
      formula::v1_stationary(params.gamma, params.p2, params.p1, x2, x1);
  return make_payoff_pair(v1, v2, params.gamma);
}

PayoffPair v_profile(const StrategySpec& s1, const StrategySpec& s2,
                     const GameParams& params) {
  s1.validate();
  s2.validate();
  if (s1.kind != s2.kind || (s1.kind == StrategyKind::Stationary ? false
                                                                 : s1.param != s2.param))
    throw std::invalid_argument(
        "unsupported profile: closed forms cover same-family, same-parameter "
        "profiles only; use the evaluator for mixed profiles");

  const double g = params.gamma, p1 = params.p1, p2 = params.p2;
  double v1 = 0.0, v2 = 0.0;
  switch (s1.kind) {
    case StrategyKind::Cooperate:
      v1 = v2 = 1.0;
      break;
    case StrategyKind::Defect:
      v1 = formula::v1_defect(g, p1, p2);
      v2 = formula::v1_defect(g, p2, p1);
      break;
    case StrategyKind::Stationary:
      return v_stationary(params, s1.x, s2.x);
    case StrategyKind::EarlyShoot:
      check_clock_param(s1.param, "DC window K");
      v1 = formula::v1_early_shoot(g, p1, p2, s1.param);
      v2 = formula::v1_early_shoot(g, p2, p1, s1.param);
      break;
    case StrategyKind::LateShoot:
      check_clock_param(s1.param, "CD onset K");
      v1 = formula::v1_late_shoot(g, p1, p2, s1.param);
      v2 = formula::v1_late_shoot(g, p2, p1, s1.param);
      break;
    case StrategyKind::Periodic:
      check_clock_param(s1.param, "period parameter M");
      v1 = formula::v1_periodic(g, p1, p2, s1.param);
      v2 = formula::v1_periodic(g, p2, p1, s1.param);
      break;
  }
  return make_payoff_pair(v1, v2, params.gamma);
}

double cooperation_gap(const GameParams& params, int player) {
  if (player != 1 && player != 2)
    throw std::invalid_argument("player must be 1 or 2");
  const double p_other = player == 1 ? params.p2 : params.p1;
  return formula::cooperation_gap_total(params.gamma, params.p1, params.p2,
                                        p_other);
}

SignPolynomials sign_polynomials(int m, int k, double gamma, double p) {
  if (m < 1) throw std::invalid_argument("period parameter M must be >= 1");
  if (k < 1 || k > m - 1)
    throw std::invalid_argument("early-shot round K must satisfy 1 <= K <= M-1");
  check_clock_param(m, "period parameter M");

  const double q = 1.0 - p;
  SignPolynomials out{};
  out.f1 = q * q * std::pow(gamma, m + 2) - q * q * q * std::pow(gamma, m + k + 3);
  out.f2 = -std::pow(gamma, m + 1) + q * std::pow(gamma, k + 2);
  out.f_mk = out.f1 + out.f2;
  out.bracket = formula::periodic_early_shot_bracket(gamma, p, p, m, k);
  out.fbar_m = -q * q * q * std::pow(gamma, m + 1) + gamma * p * p -
               (2.0 * gamma + 1.0) * p + gamma;
  out.h1 = h1_center(m);
  out.h2 = h2_center(m);
  return out;
}

double h1_center(int m) {
  if (m < 1) throw std::invalid_argument("M must be >= 1");
  const double e = std::exp(-static_cast<double>(m));
  const double expanded = -std::pow(9.0 + e, 3) * std::pow(0.9, m + 1) / 1000.0 +
                          9.0 * (1.0 - e) * (1.0 - e) / 1000.0 + 31.0 / 50.0 +
                          7.0 * e / 25.0;
  // Independent route through the generic polynomial at the center point.
  const double p = (1.0 - e) / 10.0;
  const double q = 1.0 - p;
  const double fbar = -q * q * q * std::pow(0.9, m + 1) + 0.9 * p * p -
                      2.8 * p + 0.9;
  if (std::abs(expanded - fbar) > 1e-12)
    throw InconsistencyError("center-point sign constant: expanded form and "
                             "polynomial route disagree at M=" + std::to_string(m));
  return expanded;
}

double h2_center(int m) {
  if (m < 1) throw std::invalid_argument("M must be >= 1");
  const double e = std::exp(-static_cast<double>(m));
  return -std::pow(9.0 + e, 3) * std::pow(0.9, m + 1) / 1000.0 + 31.0 / 50.0;
}

double stay_gain_vs_grim_cooperate(const GameParams& params) {
  return formula::stay_gain_vs_grim_cooperate(params.gamma, params.p1, params.p2);
}

double late_shoot_early_onset_gain(const GameParams& params, int k) {
  if (k < 1) throw std::invalid_argument("CD onset K must be >= 1");
  check_clock_param(k, "CD onset K");
  return formula::late_shoot_early_onset_gain(params.gamma, params.p1,
                                              params.p2, k);
}

double early_shoot_skip_limit_gain(int k, double p1, double p2) {
  if (k < 1) throw std::invalid_argument("DC window K must be >= 1");
  check_clock_param(k, "DC window K");
  return formula::early_shoot_skip_limit_gain(p1, p2, k);
}

double periodic_early_shot_gain(const GameParams& params, int m, int k) {
  if (m < 1) throw std::invalid_argument("period parameter M must be >= 1");
  if (k < 0 || k > m - 1)
    throw std::invalid_argument("early-shot round K must satisfy 0 <= K <= M-1");
  check_clock_param(m, "period parameter M");
  return formula::periodic_early_shot_gain(params.gamma, params.p1, params.p2,
                                           m, k);
}

}  // namespace duel
