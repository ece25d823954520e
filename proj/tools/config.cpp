#include "unipark/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace unipark::cli {
namespace {

using KeyValues = std::map<std::string, std::string>;

const std::set<std::string> kKnownKeys = {
    "controller", "penalty",   "penalty1",  "penalty2",  "eps1",      "eps2",
    "v_bar",      "omega_bar", "sigma",     "ic_polar",  "ic_cartesian", "dt",
    "t_max",      "stop_norm", "rho_floor", "require_convergence", "b1", "b2",
    "mu1",        "mu2",       "eps1_hat0", "eps2_hat0", "normalization", "n0",
    "kappa"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_factor(std::string_view f, std::string_view whole) {
  if (f == "pi") return std::numbers::pi;
  double value = 0;
  const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (f.empty() || f.front() == '-' || ec != std::errc{} || end != f.data() + f.size()) {
    throw ConfigError("not a number: '" + std::string(whole) + "'");
  }
  return value;
}

class ScenarioReader {
 public:
  ScenarioReader(std::string name, KeyValues kv) : name_(std::move(name)), kv_(std::move(kv)) {}

  Scenario read() {
    for (const auto& [key, value] : kv_) {
      if (!kKnownKeys.contains(key)) fail("unknown key '" + key + "'");
    }
    Scenario s;
    s.name = name_;
    read_controller(s);
    read_penalties(s);
    read_ics(s);
    read_sim(s);
    read_adaptive(s);
    if (auto k = get("kappa")) {
      for (auto part : split(*k, ',')) {
        const double kappa = number(part);
        if (!(kappa > 0)) fail("kappa values must be positive");
        s.kappa.push_back(kappa);
      }
    }
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("[" + name_ + "] " + what);
  }

  std::optional<std::string> get(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
  }

  double number(std::string_view text) const {
    try {
      return parse_number(text);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

  double number_or(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? number(*v) : fallback;
  }

  double positive_or(const std::string& key, double fallback) const {
    const double v = number_or(key, fallback);
    if (!(v > 0)) fail(key + " must be positive");
    return v;
  }

  BuiltinPenalty penalty(const std::string& text) const {
    const auto kind = parse_builtin_penalty(std::string(trim(text)));
    if (!kind) fail("unknown penalty '" + text + "'");
    return *kind;
  }

  void read_controller(Scenario& s) const {
    const std::string c = std::string(trim(get("controller").value_or("optimal")));
    if (c == "optimal") {
      s.controller = ControllerKind::kOptimal;
    } else if (c == "continuous") {
      s.controller = ControllerKind::kContinuous;
    } else if (c == "adaptive") {
      s.controller = ControllerKind::kAdaptive;
    } else {
      fail("unknown controller '" + c + "'");
    }
  }

  void read_penalties(Scenario& s) const {
    if (auto p = get("penalty")) s.penalty1 = s.penalty2 = penalty(*p);
    if (auto p = get("penalty1")) s.penalty1 = penalty(*p);
    if (auto p = get("penalty2")) s.penalty2 = penalty(*p);
    s.eps1 = positive_or("eps1", 1.0);
    s.eps2 = positive_or("eps2", 1.0);
    if (get("sigma")) {
      s.saturation = Saturation{positive_or("v_bar", 1.0), positive_or("omega_bar", 1.0),
                                positive_or("sigma", 0.1)};
    } else if (get("v_bar") || get("omega_bar")) {
      fail("sigma missing for saturation limits");
    }
    if (s.adaptive()) return;
    for (auto kind : {s.penalty1, s.penalty2}) {
      if (std::isfinite(make_penalty(kind)->domain_limit()) && !s.saturation) {
        fail("sigma missing for bounded penalty " + std::string(to_string(kind)));
      }
    }
  }

  void read_ics(Scenario& s) const {
    const auto polar = get("ic_polar");
    const auto cart = get("ic_cartesian");
    if (polar && cart) fail("give ic_polar or ic_cartesian, not both");
    if (!polar && !cart) fail("no initial condition");
    for (auto ic : split(polar ? *polar : *cart, ';')) {
      if (ic.empty()) continue;
      const auto parts = split(ic, ',');
      if (parts.size() != 3) fail("initial condition needs three values: '" + std::string(ic) + "'");
      const double a = number(parts[0]), b = number(parts[1]), c = number(parts[2]);
      InitialCondition entry{std::string(ic), {}};
      if (polar) {
        if (!(a > 0)) fail("initial rho must be positive");
        entry.xi = PolarStated{a, b, c};
      } else {
        if (a == 0 && b == 0) fail("initial position at the origin");
        entry.xi = to_polar(CartesianPosed{a, b, c});
      }
      s.ics.push_back(std::move(entry));
    }
    if (s.ics.empty()) fail("no initial condition");
  }

  void read_sim(Scenario& s) const {
    s.sim.dt = number_or("dt", s.sim.dt);
    s.sim.t_max = number_or("t_max", s.sim.t_max);
    s.sim.stop_norm = number_or("stop_norm", s.sim.stop_norm);
    s.sim.rho_floor = number_or("rho_floor", s.sim.rho_floor);
    try {
      s.sim.validate();
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (auto r = get("require_convergence")) {
      const auto v = trim(*r);
      if (v == "true" || v == "1" || v == "yes") {
        s.require_convergence = true;
      } else if (v == "false" || v == "0" || v == "no") {
        s.require_convergence = false;
      } else {
        fail("require_convergence must be true or false");
      }
    }
  }

  void read_adaptive(Scenario& s) const {
    s.slip = SlipParamsd{positive_or("b1", 1.0), positive_or("b2", 1.0)};
    s.mu1 = number_or("mu1", s.mu1);
    s.mu2 = number_or("mu2", s.mu2);
    if (s.mu1 < 0 || s.mu2 < 0) fail("mu must be >= 0");
    s.eps1_hat0 = number_or("eps1_hat0", 0.0);
    s.eps2_hat0 = number_or("eps2_hat0", 0.0);
    if (trim(get("normalization").value_or("linear")) != "linear") {
      fail("only linear normalization is supported");
    }
    s.n0 = positive_or("n0", 1.0);
  }

  std::string name_;
  KeyValues kv_;
};

}  // namespace

double parse_number(std::string_view text) {
  std::string_view s = trim(text);
  double sign = 1;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    if (s.front() == '-') sign = -1;
    s = trim(s.substr(1));
  }
  if (s.empty()) throw ConfigError("not a number: '" + std::string(text) + "'");
  double value = 1;
  char op = '*';
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && s[i] != '*' && s[i] != '/') continue;
    const double f = parse_factor(trim(s.substr(start, i - start)), text);
    value = op == '*' ? value * f : value / f;
    if (i < s.size()) op = s[i];
    start = i + 1;
  }
  value *= sign;
  if (!std::isfinite(value)) throw ConfigError("not a finite number: '" + std::string(text) + "'");
  return value;
}

std::vector<Scenario> parse_scenarios(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  KeyValues defaults;
  std::vector<std::pair<std::string, KeyValues>> sections;
  for (const auto& [name, section] : tree) {
    if (section.empty()) throw ConfigError("key '" + name + "' outside a section");
    KeyValues kv;
    for (const auto& [key, value] : section) kv[key] = value.data();
    if (name == "defaults") {
      defaults = std::move(kv);
    } else {
      sections.emplace_back(name, std::move(kv));
    }
  }
  if (sections.empty()) throw ConfigError("no scenarios in config");
  std::vector<Scenario> scenarios;
  for (auto& [name, kv] : sections) {
    // existing keys win; an IC given in either form replaces the default IC
    const bool own_ic = kv.contains("ic_polar") || kv.contains("ic_cartesian");
    for (const auto& [key, value] : defaults) {
      if (own_ic && key.starts_with("ic_")) continue;
      kv.emplace(key, value);
    }
    scenarios.push_back(ScenarioReader(name, std::move(kv)).read());
  }
  return scenarios;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse_scenarios(in);
}

ControllerConfig controller_config(const Scenario& s) {
  if (s.adaptive()) throw std::invalid_argument("controller_config: adaptive scenario");
  const auto variant = s.controller == ControllerKind::kOptimal ? FeedbackVariant::kOptimal
                                                                : FeedbackVariant::kContinuous;
  auto penalty = [&](BuiltinPenalty kind) -> PenaltyPtr {
    auto p = make_penalty(kind);
    if (kind == BuiltinPenalty::kRelayApprox && variant == FeedbackVariant::kContinuous) {
      return std::make_shared<TabulatedPenalty>(p);
    }
    return p;
  };
  if (s.saturation) {
    return make_saturated_config(penalty(s.penalty1), penalty(s.penalty2), *s.saturation, variant,
                                 s.eps1, s.eps2);
  }
  ControllerConfig cfg{penalty(s.penalty1), penalty(s.penalty2), constant_gain(s.eps1),
                       constant_gain(s.eps2), variant, std::nullopt};
  cfg.validate();
  return cfg;
}

AdaptiveState adaptive_state(const Scenario& s) {
  AdaptiveState a;
  a.eps1_hat = s.eps1_hat0;
  a.eps2_hat = s.eps2_hat0;
  a.mu1 = s.mu1;
  a.mu2 = s.mu2;
  a.normalization = Normalization::linear(s.n0);
  return a;
}

}  // namespace unipark::cli
