#pragma once

#include "duel/game.hpp"
#include "duel/strategy.hpp"

namespace duel {

// Normalized and total expected payoffs for both players. V_n = v_n/(1-gamma).
struct PayoffPair {
  double v1 = 0.0;
  double v2 = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
};

inline PayoffPair make_payoff_pair(double v1, double v2, double gamma) {
  return {v1, v2, v1 / (1.0 - gamma), v2 / (1.0 - gamma)};
}

// ---------------------------------------------------------------------------
// Templated formula cores, usable with double or with duel::Rational for
// exact identity checks. Parameters are passed as plain scalars here; the
// double-precision wrappers below take GameParams.
// ---------------------------------------------------------------------------
namespace formula {

template <class T>
T ipow(T base, long exp) {
  T out(1);
  for (long i = 0; i < exp; ++i) out *= base;
  return out;
}

// Normalized payoff of player 1 under stationary shoot probabilities (x1, x2).
template <class T>
T v1_stationary(const T& g, const T& p1, const T& p2, const T& x1, const T& x2) {
  const T num = T(1) - g * (T(1) - p1 * x1 * (T(1) - p2 * x2));
  const T den = T(1) - g * (T(1) - p1 * x1) * (T(1) - p2 * x2);
  return num / den;
}

template <class T>
T v1_defect(const T& g, const T& p1, const T& p2) {
  return v1_stationary(g, p1, p2, T(1), T(1));
}

// Both players shoot at rounds 1..K, then never again.
template <class T>
T v1_early_shoot(const T& g, const T& p1, const T& p2, int k) {
  const T q1 = T(1) - p1, q2 = T(1) - p2;
  const T num = T(1) + ipow(g, k + 1) * ipow(q1, k) * ipow(q2, k) * p2 -
                g * (T(1) - p1 + p1 * p2);
  const T den = T(1) - g * q1 * q2;
  return num / den;
}

// Both players shoot from round K on.
template <class T>
T v1_late_shoot(const T& g, const T& p1, const T& p2, int k) {
  const T q1 = T(1) - p1, q2 = T(1) - p2;
  const T num = T(1) - ipow(g, k) * p2 - g * q1 * q2;
  const T den = T(1) - g * q1 * q2;
  return num / den;
}

// Both players shoot at rounds M+1, 2(M+1), ...
template <class T>
T v1_periodic(const T& g, const T& p1, const T& p2, int m) {
  const T q1 = T(1) - p1, q2 = T(1) - p2;
  const T gm = ipow(g, m + 1);
  const T num = T(1) - gm * (T(1) - p1 * q2);
  const T den = T(1) - gm * q1 * q2;
  return num / den;
}

// Total-payoff advantage of mutual never-shooting over mutual always-shooting
// for the player whose opponent hits with probability p_other.
template <class T>
T cooperation_gap_total(const T& g, const T& p1, const T& p2, const T& p_other) {
  return g * p_other /
         ((T(1) - g) * (T(1) - g * (T(1) - p1) * (T(1) - p2)));
}

// Normalized amount player 1 forgoes by defecting at round 1 against a grim
// never-shooter (positive: compliance is strictly better). Derivation: the
// deviator shoots at round 1 and, on a miss, faces mutual fire from round 2
// (the punisher opens fire one round after the observed deviation), so
// V_dev = 1 + g (p1/(1-g) + (1-p1) V_D); subtracting from 1/(1-g) and
// normalizing leaves g^2 p2 (1-p1) / (1 - g q1 q2). Cross-checked against the
// exact evaluator in the verification suite.
template <class T>
T stay_gain_vs_grim_cooperate(const T& g, const T& p1, const T& p2) {
  return ipow(g, 2) * p2 * (T(1) - p1) /
         (T(1) - g * (T(1) - p1) * (T(1) - p2));
}

// Normalized compliance-minus-deviation gap when player 1 starts shooting one
// round before a mutual shoot-from-K profile. Negative: the deviation wins.
// Derivation: V_dev = sum_{t<K-1} g^t + g^{K-1} (p1/(1-g) + (1-p1) V_D),
// where V_D is the mutual always-shoot total value; subtracting from the
// compliant value and simplifying leaves -g^K p1 p2 / (1 - g q1 q2). This is
// cross-checked against the exact evaluator in the verification suite.
template <class T>
T late_shoot_early_onset_gain(const T& g, const T& p1, const T& p2, int k) {
  return -p1 * p2 * ipow(g, k) /
         (T(1) - g * (T(1) - p2) * (T(1) - p1));
}

// Compliance-minus-deviation gap when player 1 skips the shot at round L
// (1 <= L <= K) of a mutual shoot-through-K grim profile and shoots forever
// after; the triggered opponent also shoots forever. Summing the single
// both-alive trajectory geometrically and factoring out the common survival
// mass gives
//   gap = g^L Q^{L-1} [ (1-g) B (1-r) + r - (1-g) q2 (1 + g B) ],
// with Q = q1 q2, r = (g Q)^{K-L+1}, B = (p1 q2 / (1-g) + Q) / (1 - g Q).
// Agrees with the exact evaluator to working precision; exact when T is
// rational.
template <class T>
T early_shoot_skip_gap(const T& g, const T& p1, const T& p2, int k, int l) {
  const T q1 = T(1) - p1, q2 = T(1) - p2;
  const T big_q = q1 * q2;
  const T g_big_q = g * big_q;
  const T r = ipow(g_big_q, k - l + 1);
  const T one_minus_g = T(1) - g;
  // (1-g) B and (1-g) g B, kept multiplied through to stay finite at g -> 1.
  const T b_scaled = (p1 * q2 + one_minus_g * big_q) / (T(1) - g * big_q);
  const T inner =
      b_scaled * (T(1) - r) + r - q2 * (one_minus_g + g * b_scaled);
  return ipow(g, l) * ipow(big_q, l - 1) * inner;
}

// gamma -> 1 limit of the minimum-over-L skip gap above: per skip round L the
// limit is Q^{L-1} [ p1 q2 (p2 - Q^{K-L+1}) / (1-Q) + Q^{K-L+1} ].
template <class T>
T early_shoot_skip_limit_gain(const T& p1, const T& p2, int k) {
  const T big_q = (T(1) - p1) * (T(1) - p2);
  T best(0);
  bool first = true;
  for (int l = 1; l <= k; ++l) {
    const T r = ipow(big_q, k - l + 1);
    const T lim = ipow(big_q, l - 1) *
                  (p1 * (T(1) - p2) * (p2 - r) / (T(1) - big_q) + r);
    if (first || lim < best) {
      best = lim;
      first = false;
    }
  }
  return best;
}

// Compliance-minus-deviation gap for a mutual period-(M+1) profile when
// player 1 instead fires at round K+1 of the first period (0 <= K <= M-1)
// and keeps firing. Written with gamma^{K+2} factored out so that the
// bracket, whose sign decides everything, never underflows.
template <class T>
T periodic_early_shot_bracket(const T& g, const T& p1, const T& p2, int m, int k) {
  const T q1 = T(1) - p1, q2 = T(1) - p2;
  return -q1 * q1 * q2 * ipow(g, m + 1) + q1 * q2 * ipow(g, m - k) -
         ipow(g, m - k - 1) + T(1) - p1;
}

template <class T>
T periodic_early_shot_gain(const T& g, const T& p1, const T& p2, int m, int k) {
  const T q1 = T(1) - p1, q2 = T(1) - p2;
  const T den = (T(1) - ipow(g, m + 1) * q1 * q2) * (T(1) - g * q1 * q2);
  return p2 * ipow(g, k + 2) * periodic_early_shot_bracket(g, p1, p2, m, k) / den;
}

}  // namespace formula

// ---------------------------------------------------------------------------
// Double-precision surface.
// ---------------------------------------------------------------------------

// Largest strategy-clock parameter the closed forms accept; beyond this the
// gamma powers are handled through the factored brackets only.
inline constexpr int kMaxClockParam = 10'000;

PayoffPair v_stationary(const GameParams& params, double x1, double x2);

// Closed-form payoff for a symmetric-family profile: (C,C), (D,D),
// (DC(K),DC(K)), (CD(K),CD(K)), (P(M),P(M)), or a stationary pair.
// Grim wrapping does not change on-path play and is ignored here.
// Mixed-family profiles are rejected; use the evaluator for those.
PayoffPair v_profile(const StrategySpec& s1, const StrategySpec& s2,
                     const GameParams& params);

// Total-payoff gap between mutual cooperation and mutual defection for one
// player; strictly positive for all valid parameters.
double cooperation_gap(const GameParams& params, int player);

// Sign-deciding polynomials for the periodic-profile equilibrium analysis at
// parameter M with an early shot at round K+1 (1 <= K <= M-1).
//   f_mk   = f1 + f2, same sign as the deviation gap at p1 = p2 = p
//   f1     = (1-p)^2 g^{M+2} - (1-p)^3 g^{M+K+3}
//   f2     = -g^{M+1} + (1-p) g^{K+2}
//   bracket= f_mk with g^{K+2} factored out (sign-stable for large M, K)
//   fbar_m = f_{M,M-1} with the common g^{M+1} factor removed
//   h1, h2 = fbar_m evaluated at the center point (9/10, (1-e^-M)/10), and
//            its simplified lower bound
struct SignPolynomials {
  double f_mk;
  double f1;
  double f2;
  double bracket;
  double fbar_m;
  double h1;
  double h2;
};

SignPolynomials sign_polynomials(int m, int k, double gamma, double p);

// Center-point sign constants as functions of M alone (M >= 1). h1_center
// evaluates both the expanded form and the fbar route and insists they agree.
double h1_center(int m);
double h2_center(int m);

// Deviation-gain closed forms (double wrappers over the formula cores).
double stay_gain_vs_grim_cooperate(const GameParams& params);
double late_shoot_early_onset_gain(const GameParams& params, int k);
double early_shoot_skip_limit_gain(int k, double p1, double p2);
double periodic_early_shot_gain(const GameParams& params, int m, int k);

}  // namespace duel
