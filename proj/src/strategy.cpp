#include "duel/strategy.hpp"

#include <charconv>
#include <stdexcept>

namespace duel {

void StrategySpec::validate() const {
  switch (kind) {
    case StrategyKind::Stationary:
      if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("stationary shoot probability must be in [0,1]");
      if (grim && x > 0.0 && x < 1.0)
        throw std::invalid_argument(
            "grim wrapping of a randomized stationary strategy is undefined: "
            "deviation from a mixed prescription is not observable");
      break;
    case StrategyKind::EarlyShoot:
      if (param < 0) throw std::invalid_argument("DC window K must be >= 0");
      break;
    case StrategyKind::LateShoot:
      if (param < 1) throw std::invalid_argument("CD onset K must be >= 1");
      break;
    case StrategyKind::Periodic:
      if (param < 0) throw std::invalid_argument("period parameter M must be >= 0");
      break;
    default:
      break;
  }
}

StrategySpec StrategySpec::stationary(double x) {
  StrategySpec s{StrategyKind::Stationary, x, 0, false};
  s.validate();
  return s;
}
StrategySpec StrategySpec::cooperate(bool grim) {
  return {StrategyKind::Cooperate, 0.0, 0, grim};
}
StrategySpec StrategySpec::defect(bool grim) {
  return {StrategyKind::Defect, 0.0, 0, grim};
}
StrategySpec StrategySpec::early_shoot(int k, bool grim) {
  StrategySpec s{StrategyKind::EarlyShoot, 0.0, k, grim};
  s.validate();
  return s;
}
StrategySpec StrategySpec::late_shoot(int k, bool grim) {
  StrategySpec s{StrategyKind::LateShoot, 0.0, k, grim};
  s.validate();
  return s;
}
StrategySpec StrategySpec::periodic(int m, bool grim) {
  StrategySpec s{StrategyKind::Periodic, 0.0, m, grim};
  s.validate();
  return s;
}

StrategySpec StrategySpec::parse(std::string_view text) {
  const std::string_view original = text;
  auto fail = [original]() -> StrategySpec {
    throw std::invalid_argument(
        "cannot parse strategy spec '" + std::string(original) +
        "'; expected C | D | x:<prob> | DC:<K> | CD:<K> | P:<M>, "
        "optionally prefixed with grim-");
  };

  bool grim = false;
  if (text.starts_with("grim-")) {
    grim = true;
    text.remove_prefix(5);
  }
  if (text == "C") return cooperate(grim);
  if (text == "D") return defect(grim);

  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return fail();
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg = text.substr(colon + 1);

  if (head == "x") {
    double x = 0.0;
    const auto res = std::from_chars(arg.data(), arg.data() + arg.size(), x);
    if (res.ec != std::errc{} || res.ptr != arg.data() + arg.size()) return fail();
    StrategySpec s{StrategyKind::Stationary, x, 0, grim};
    s.validate();  // rejects grim wrapping of a properly mixed x
    return s;
  }

  int value = 0;
  const auto res = std::from_chars(arg.data(), arg.data() + arg.size(), value);
  if (res.ec != std::errc{} || res.ptr != arg.data() + arg.size()) return fail();
  if (head == "DC") return early_shoot(value, grim);
  if (head == "CD") return late_shoot(value, grim);
  if (head == "P") return periodic(value, grim);
  return fail();
}

std::string StrategySpec::to_string() const {
  std::string out = grim ? "grim-" : "";
  switch (kind) {
    case StrategyKind::Cooperate: return out + "C";
    case StrategyKind::Defect: return out + "D";
    case StrategyKind::Stationary: {
      std::string v = std::to_string(x);
      return out + "x:" + v;
    }
    case StrategyKind::EarlyShoot: return out + "DC:" + std::to_string(param);
    case StrategyKind::LateShoot: return out + "CD:" + std::to_string(param);
    case StrategyKind::Periodic: return out + "P:" + std::to_string(param);
  }
  return out;
}

StrategyAutomaton StrategyAutomaton::from_schedule(std::vector<double> prefix,
                                                   std::vector<double> cycle,
                                                   bool grim) {
  if (cycle.empty()) throw std::invalid_argument("schedule cycle must be nonempty");
  StrategyAutomaton a;
  a.prefix_ = std::move(prefix);
  a.cycle_ = std::move(cycle);
  a.grim_ = grim;
  a.deterministic_ = true;
  for (const auto& v : a.prefix_)
    if (v != 0.0 && v != 1.0) a.deterministic_ = false;
  for (const auto& v : a.cycle_) {
    if (v != 0.0 && v != 1.0) a.deterministic_ = false;
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("emission probabilities must be in [0,1]");
  }
  for (const auto& v : a.prefix_)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("emission probabilities must be in [0,1]");
  if (a.grim_ && !a.deterministic_)
    throw std::invalid_argument("grim wrapping requires a deterministic schedule");
  return a;
}

StrategyAutomaton StrategyAutomaton::compile(const StrategySpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case StrategyKind::Cooperate:
      return from_schedule({}, {0.0}, spec.grim);
    case StrategyKind::Defect:
      return from_schedule({}, {1.0}, spec.grim);
    case StrategyKind::Stationary:
      return from_schedule({}, {spec.x}, spec.grim);
    case StrategyKind::EarlyShoot:
      return from_schedule(std::vector<double>(spec.param, 1.0), {0.0}, spec.grim);
    case StrategyKind::LateShoot:
      return from_schedule(std::vector<double>(spec.param - 1, 0.0), {1.0}, spec.grim);
    case StrategyKind::Periodic: {
      std::vector<double> cyc(spec.param, 0.0);
      cyc.push_back(1.0);
      return from_schedule({}, std::move(cyc), spec.grim);
    }
  }
  throw std::invalid_argument("unknown strategy kind");
}

double StrategyAutomaton::schedule_at(int clock) const {
  const int p = static_cast<int>(prefix_.size());
  if (clock < p) return prefix_[clock];
  return cycle_[(clock - p) % cycle_.size()];
}

double StrategyAutomaton::emit(Memory m) const {
  if (m.triggered) return 1.0;
  return schedule_at(m.clock);
}

StrategyAutomaton::Memory StrategyAutomaton::advance(Memory m, int own_action,
                                                     int opponent_action) const {
  (void)own_action;
  Memory next = m;
  if (grim_ && !m.triggered) {
    const int prescribed = schedule_at(m.clock) >= 0.5 ? 1 : 0;
    if (opponent_action != prescribed) next.triggered = true;
  }
  next.clock = m.clock + 1;
  if (next.clock >= clock_count()) {
    const int p = static_cast<int>(prefix_.size());
    next.clock = p + (next.clock - p) % static_cast<int>(cycle_.size());
  }
  return next;
}

StrategyAutomaton::Memory StrategyAutomaton::memory_at(int idx) const {
  if (grim_) return {idx / 2, (idx % 2) != 0};
  return {idx, false};
}

bool StrategyAutomaton::silent_forever(Memory m) const {
  // For grim automata this describes the no-further-deviation path only;
  // a future trigger would of course break silence.
  if (m.triggered) return false;
  for (int c = m.clock; c < clock_count(); ++c)
    if (schedule_at(c) > 0.0) return false;
  for (const double v : cycle_)
    if (v > 0.0) return false;
  return true;
}

}  // namespace duel
