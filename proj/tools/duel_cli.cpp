// Command-line front end: payoff queries, Monte Carlo runs, equilibrium
// checks, parameter sweeps, and the full verification suite.
//
// Output schema: JSON {config, result, provenance{version, seed}} for single
// queries; CSV with a mandatory header row and 12 significant digits for
// sweeps. Identical configurations (including seeds) produce byte-identical
// output.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "duel/closed_form.hpp"
#include "duel/equilibrium.hpp"
#include "duel/evaluator.hpp"
#include "duel/game.hpp"
#include "duel/rational.hpp"
#include "duel/strategy.hpp"
#include "duel/verify.hpp"

namespace {

using nlohmann::json;
using namespace duel;

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string gamma = "0.5";
  std::string p1 = "0.5";
  std::string p2 = "0.5";
  std::string profile = "D,D";
  double epsilon = 1e-9;
  long long episodes = 100'000;
  std::uint64_t seed = 1;
  int grid = 101;
  std::string format;  // per-command default when empty
  std::string out;
  bool exact = false;
  // command-specific
  int k = 1;
  int kmax = 0;  // gamma0: sweep K = 1..kmax when > 0
  double tol = 1e-6;
  int m = 3;
  double half_width = 0.05;
};

double parse_double_flag(const std::string& text, const char* name) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("invalid value for --") + name +
                                ": '" + text + "'");
  }
}

// Exact rational from a decimal literal such as "0.3" or "9.5e-1", so that
// --exact works on the numbers the user typed rather than their binary
// rounding.
Rational parse_decimal_rational(const std::string& text) {
  using boost::multiprecision::cpp_int;
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-'))
    negative = text[i++] == '-';
  cpp_int mantissa = 0;
  long frac_digits = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-'))
      exp_neg = text[i++] == '-';
    bool exp_digit = false;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
      exponent = exponent * 10 + (text[i] - '0');
      exp_digit = true;
    }
    if (!exp_digit) seen_digit = false;
    if (exp_neg) exponent = -exponent;
  }
  if (!seen_digit || i != text.size())
    throw std::invalid_argument("not a decimal literal: '" + text + "'");
  Rational out(mantissa);
  const long net = exponent - frac_digits;
  const cpp_int shift = boost::multiprecision::pow(cpp_int(10),
                                                   static_cast<unsigned>(net < 0 ? -net : net));
  if (net < 0)
    out /= Rational(shift);
  else
    out *= Rational(shift);
  return negative ? -out : out;
}

GameParams make_params(const Options& opt) {
  return GameParams(parse_double_flag(opt.gamma, "gamma"),
                    parse_double_flag(opt.p1, "p1"),
                    parse_double_flag(opt.p2, "p2"));
}

std::pair<std::string, std::string> split_profile(const std::string& profile) {
  const auto comma = profile.find(',');
  if (comma == std::string::npos || profile.find(',', comma + 1) != std::string::npos)
    throw std::invalid_argument(
        "--profile expects exactly two comma-separated strategy specs, e.g. "
        "'grim-C,grim-C'");
  return {profile.substr(0, comma), profile.substr(comma + 1)};
}

std::string csv_num(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

json payoff_json(const PayoffPair& p) {
  return {{"v1", p.v1}, {"v2", p.v2}, {"V1", p.V1}, {"V2", p.V2}};
}

json config_json(const Options& opt, const std::string& command) {
  json c{{"command", command},
         {"gamma", parse_double_flag(opt.gamma, "gamma")},
         {"p1", parse_double_flag(opt.p1, "p1")},
         {"p2", parse_double_flag(opt.p2, "p2")}};
  c["epsilon"] = opt.epsilon;
  if (command == "payoff" || command == "simulate" || command == "check-ne")
    c["profile"] = opt.profile;
  if (command == "simulate") {
    c["episodes"] = opt.episodes;
    c["seed"] = opt.seed;
  }
  if (command == "scan-stationary" || command == "prop5-region")
    c["grid"] = opt.grid;
  if (command == "gamma0") {
    if (opt.kmax > 0)
      c["kmax"] = opt.kmax;
    else
      c["k"] = opt.k;
    c["tol"] = opt.tol;
    c.erase("gamma");  // searched over, not an input
  }
  if (command == "prop5-region") {
    c["m"] = opt.m;
    c["half_width_max"] = opt.half_width;
    // center is fixed by the scan, not by the parameter flags
    c.erase("gamma");
    c.erase("p1");
    c.erase("p2");
  }
  if (opt.exact) c["exact"] = true;
  return c;
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output path: " + opt.out);
  f << text;
}

void emit_json(const Options& opt, const std::string& command, json result) {
  json doc{{"config", config_json(opt, command)},
           {"result", std::move(result)},
           {"provenance", {{"version", kVersion}, {"seed", opt.seed}}}};
  emit(opt, doc.dump(2) + "\n");
}

// Exact rational on-path payoff of a symmetric-family profile; mirrors
// v_profile. The stationary branch reparses the spec text so that x is the
// decimal the user wrote.
std::pair<Rational, Rational> exact_profile_payoff(const StrategySpec& s1,
                                                   const StrategySpec& s2,
                                                   const std::string& text1,
                                                   const std::string& text2,
                                                   const Options& opt) {
  if (s1.kind != s2.kind ||
      (s1.kind != StrategyKind::Stationary && s1.param != s2.param))
    throw std::invalid_argument(
        "--exact covers same-family, same-parameter profiles only");
  const Rational g = parse_decimal_rational(opt.gamma);
  const Rational p1 = parse_decimal_rational(opt.p1);
  const Rational p2 = parse_decimal_rational(opt.p2);
  switch (s1.kind) {
    case StrategyKind::Cooperate:
      return {Rational(1), Rational(1)};
    case StrategyKind::Defect:
      return {formula::v1_defect(g, p1, p2), formula::v1_defect(g, p2, p1)};
    case StrategyKind::Stationary: {
      const auto x_of = [](const std::string& t) {
        const auto colon = t.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("malformed stationary spec: " + t);
        return parse_decimal_rational(t.substr(colon + 1));
      };
      const Rational x1 = x_of(text1), x2 = x_of(text2);
      return {formula::v1_stationary(g, p1, p2, x1, x2),
              formula::v1_stationary(g, p2, p1, x2, x1)};
    }
    case StrategyKind::EarlyShoot:
      return {formula::v1_early_shoot(g, p1, p2, s1.param),
              formula::v1_early_shoot(g, p2, p1, s1.param)};
    case StrategyKind::LateShoot:
      return {formula::v1_late_shoot(g, p1, p2, s1.param),
              formula::v1_late_shoot(g, p2, p1, s1.param)};
    case StrategyKind::Periodic:
      return {formula::v1_periodic(g, p1, p2, s1.param),
              formula::v1_periodic(g, p2, p1, s1.param)};
  }
  throw std::invalid_argument("unknown strategy kind");
}

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

int cmd_payoff(const Options& opt) {
  const auto params = make_params(opt);
  const auto [text1, text2] = split_profile(opt.profile);
  const auto s1 = StrategySpec::parse(text1);
  const auto s2 = StrategySpec::parse(text2);
  const DPResult dp = exact_payoff(s1, s2, params);

  json result = payoff_json(dp.payoff);
  result["horizon"] = dp.horizon;
  result["tail_bound"] = dp.tail_bound;
  try {
    const PayoffPair cf = v_profile(s1, s2, params);
    result["closed_form"] = {{"v1", cf.v1}, {"v2", cf.v2}};
    if (std::abs(cf.v1 - dp.payoff.v1) > 1e-9 ||
        std::abs(cf.v2 - dp.payoff.v2) > 1e-9)
      throw InconsistencyError(
          "closed-form payoff disagrees with the evaluator beyond 1e-9");
  } catch (const std::invalid_argument&) {
    // mixed profile: evaluator only
  }
  if (opt.exact) {
    const auto [r1, r2] = exact_profile_payoff(s1, s2, text1, text2, opt);
    result["exact"] = {{"v1", rational_str(r1)},
                       {"v2", rational_str(r2)},
                       {"v1_double", to_double(r1)},
                       {"v2_double", to_double(r2)}};
  }
  emit_json(opt, "payoff", std::move(result));
  return 0;
}

int cmd_simulate(const Options& opt) {
  const auto params = make_params(opt);
  const auto [text1, text2] = split_profile(opt.profile);
  const auto s1 = StrategySpec::parse(text1);
  const auto s2 = StrategySpec::parse(text2);
  const MCResult mc = mc_payoff(s1, s2, params, opt.episodes, opt.seed);
  json result{{"estimate", payoff_json(mc.estimate)},
              {"stderr1", mc.stderr1},
              {"stderr2", mc.stderr2},
              {"episodes", mc.episodes},
              {"seed", mc.seed},
              {"max_rounds", mc.max_rounds}};
  emit_json(opt, "simulate", std::move(result));
  return 0;
}

int cmd_check_ne(const Options& opt) {
  const auto params = make_params(opt);
  const auto [text1, text2] = split_profile(opt.profile);
  const auto s1 = StrategySpec::parse(text1);
  const auto s2 = StrategySpec::parse(text2);
  const NECertificate cert = check_ne(s1, s2, params, opt.epsilon);
  json result{{"verdict", cert.ne ? "NE-within-epsilon" : "NotNE"},
              {"gain1", cert.gain1},
              {"gain2", cert.gain2},
              {"on_path", payoff_json(cert.on_path)}};
  if (cert.witness) {
    result["witness"] = {{"player", cert.witness->player},
                         {"deviation", cert.witness->description},
                         {"gain", cert.witness->gain},
                         {"baseline", payoff_json(cert.witness->baseline)}};
  }
  emit_json(opt, "check-ne", std::move(result));
  return 0;
}

int cmd_scan_stationary(const Options& opt) {
  const auto params = make_params(opt);
  const auto found = stationary_ne_scan(params, opt.grid, opt.epsilon);
  const std::string format = opt.format.empty() ? "csv" : opt.format;
  if (format == "csv") {
    std::ostringstream os;
    os << "x1,x2\n";
    for (const auto& [x1, x2] : found)
      os << csv_num(x1) << "," << csv_num(x2) << "\n";
    emit(opt, os.str());
  } else {
    json list = json::array();
    for (const auto& [x1, x2] : found) list.push_back({{"x1", x1}, {"x2", x2}});
    emit_json(opt, "scan-stationary", {{"equilibria", std::move(list)}});
  }
  return 0;
}

int cmd_gamma0(const Options& opt) {
  const double p1 = parse_double_flag(opt.p1, "p1");
  const double p2 = parse_double_flag(opt.p2, "p2");
  if (opt.kmax > 0) {
    // Per-K thresholds plus their observed supremum. A single threshold
    // uniform over all K is claimed to exist but not constructively; we
    // report what is computable.
    std::vector<double> thresholds;
    double sup = 0.0;
    for (int k = 1; k <= opt.kmax; ++k) {
      const double g0 = find_gamma0(k, p1, p2, opt.tol);
      thresholds.push_back(g0);
      sup = std::max(sup, g0);
    }
    const std::string format = opt.format.empty() ? "csv" : opt.format;
    if (format == "csv") {
      std::ostringstream os;
      os << "k,gamma0\n";
      for (int k = 1; k <= opt.kmax; ++k)
        os << k << "," << csv_num(thresholds[static_cast<std::size_t>(k - 1)])
           << "\n";
      emit(opt, os.str());
    } else {
      json rows = json::array();
      for (int k = 1; k <= opt.kmax; ++k)
        rows.push_back({{"k", k},
                        {"gamma0", thresholds[static_cast<std::size_t>(k - 1)]}});
      emit_json(opt, "gamma0",
                {{"per_k", std::move(rows)}, {"observed_supremum", sup}});
    }
    return 0;
  }
  const double g0 = find_gamma0(opt.k, p1, p2, opt.tol);
  emit_json(opt, "gamma0", {{"k", opt.k}, {"gamma0", g0}});
  return 0;
}

int cmd_prop5_region(const Options& opt) {
  const RegionScan scan = periodic_region_scan(opt.m, opt.grid, opt.half_width);
  const std::string format = opt.format.empty() ? "json" : opt.format;
  if (format == "csv") {
    std::ostringstream os;
    os << "gamma,p1,p2,min_gain\n";
    for (const auto& pt : scan.grid)
      os << csv_num(pt.gamma) << "," << csv_num(pt.p1) << "," << csv_num(pt.p2)
         << "," << csv_num(pt.min_gain) << "\n";
    emit(opt, os.str());
  } else {
    emit_json(opt, "prop5-region",
              {{"m", scan.m},
               {"center_gamma", scan.center_gamma},
               {"center_p", scan.center_p},
               {"empirical_delta", scan.empirical_delta},
               {"center_ne", scan.center_ne},
               {"grid_points", scan.grid.size()}});
  }
  return 0;
}

int cmd_verify_all(const Options& opt) {
  const auto results = run_verification();
  bool all_pass = true;
  json records = json::array();
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id
              << ": " << r.name;
    if (!r.details.empty()) std::cout << " — " << r.details;
    std::cout << " (" << std::fixed << std::setprecision(1) << r.seconds
              << "s)" << std::defaultfloat << "\n";
    records.push_back({{"id", r.id},
                       {"name", r.name},
                       {"pass", r.pass},
                       {"details", r.details},
                       {"seconds", r.seconds}});
  }
  std::cout << (all_pass ? "all criteria passed" : "some criteria FAILED")
            << "\n";
  if (!opt.out.empty()) {
    json doc{{"config", {{"command", "verify-all"}}},
             {"result", {{"criteria", std::move(records)}, {"all_pass", all_pass}}},
             {"provenance", {{"version", kVersion}, {"seed", 0}}}};
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output path: " + opt.out);
    f << doc.dump(2) << "\n";
  }
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discounted duel: payoffs, equilibrium checks, and verification"};
  app.require_subcommand(1);
  Options opt;

  const auto add_params = [&opt](CLI::App* cmd) {
    cmd->add_option("--gamma", opt.gamma, "discount factor in (0,1)");
    cmd->add_option("--p1", opt.p1, "hit probability of player 1");
    cmd->add_option("--p2", opt.p2, "hit probability of player 2");
  };
  const auto add_output = [&opt](CLI::App* cmd) {
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", opt.out, "output path (default: stdout)");
  };

  auto* payoff = app.add_subcommand("payoff", "exact expected payoff of a profile");
  add_params(payoff);
  payoff->add_option("--profile", opt.profile,
                     "pair of strategy specs, e.g. 'grim-DC:4,grim-DC:4'");
  payoff->add_flag("--exact", opt.exact,
                   "also report the rational closed form (symmetric profiles)");
  add_output(payoff);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo payoff estimate");
  add_params(simulate);
  simulate->add_option("--profile", opt.profile, "pair of strategy specs");
  simulate->add_option("--episodes", opt.episodes, "episode count")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", opt.seed, "RNG seed");
  add_output(simulate);

  auto* checkne = app.add_subcommand("check-ne", "certify or refute a profile as an epsilon-NE");
  add_params(checkne);
  checkne->add_option("--profile", opt.profile, "pair of strategy specs");
  checkne->add_option("--epsilon", opt.epsilon, "NE tolerance on normalized payoffs")
      ->check(CLI::PositiveNumber);
  add_output(checkne);

  auto* scan = app.add_subcommand("scan-stationary", "grid scan for stationary equilibria");
  add_params(scan);
  scan->add_option("--grid", opt.grid, "grid resolution per axis")
      ->check(CLI::Range(2, 100'000));
  scan->add_option("--epsilon", opt.epsilon, "NE tolerance")
      ->check(CLI::PositiveNumber);
  add_output(scan);

  auto* gamma0 = app.add_subcommand(
      "gamma0", "discount threshold for the grim shooting-window profile");
  gamma0->add_option("--p1", opt.p1, "hit probability of player 1");
  gamma0->add_option("--p2", opt.p2, "hit probability of player 2");
  gamma0->add_option("--k", opt.k, "window length K")->check(CLI::PositiveNumber);
  gamma0->add_option("--kmax", opt.kmax, "sweep K = 1..kmax and report the supremum")
      ->check(CLI::PositiveNumber);
  gamma0->add_option("--tol", opt.tol, "bisection tolerance")
      ->check(CLI::PositiveNumber);
  add_output(gamma0);

  auto* region = app.add_subcommand(
      "prop5-region", "certified parameter box for the periodic grim profile");
  region->add_option("--m", opt.m, "period parameter M")->check(CLI::PositiveNumber);
  region->add_option("--grid", opt.grid, "grid resolution per axis")
      ->check(CLI::Range(2, 1'000));
  region->add_option("--half-width", opt.half_width, "maximum box half-width")
      ->check(CLI::PositiveNumber);
  add_output(region);

  auto* verify = app.add_subcommand("verify-all", "run the full verification suite");
  verify->add_option("--report,--out", opt.out, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // The region scan cubes its grid; default to a coarse one there.
  if (region->parsed() && region->count("--grid") == 0) opt.grid = 5;

  try {
    if (payoff->parsed()) return cmd_payoff(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (checkne->parsed()) return cmd_check_ne(opt);
    if (scan->parsed()) return cmd_scan_stationary(opt);
    if (gamma0->parsed()) return cmd_gamma0(opt);
    if (region->parsed()) return cmd_prop5_region(opt);
    if (verify->parsed()) return cmd_verify_all(opt);
  } catch (const InconsistencyError& e) {
    std::cerr << "inconsistency: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
