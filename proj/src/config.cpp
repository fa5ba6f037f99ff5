// Copyright 2026 The APL Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "apl/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace apl {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Drops a trailing comment outside of quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

double parse_number(const std::string& raw, const std::string& what) {
  std::string s;
  for (char c : trim(raw)) {
    if (c != '_') s.push_back(c);
  }
  if (s.empty()) throw ConfigError(what + ": expected a number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw ConfigError(what + ": expected a number, got '" + raw + "'");
  }
  return v;
}

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  std::string s = out.str();
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string key_name(const std::string& section, const std::string& key) {
  return section + "." + key;
}

}  // namespace

ConfigTable ConfigTable::parse(const std::string& text,
                               const std::string& origin) {
  ConfigTable t;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = origin + ":" + std::to_string(number);
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": bad section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!valid_name(section)) throw ConfigError(where + ": bad section name");
      t.entries_[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside a section");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!valid_name(key)) throw ConfigError(where + ": bad key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": missing value");
    if (t.entries_[section].count(key)) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
    t.entries_[section][key] = value;
  }
  return t;
}

ConfigTable ConfigTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void ConfigTable::set(const std::string& section, const std::string& key,
                      const std::string& raw) {
  entries_[section][key] = trim(raw);
}

void ConfigTable::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override must look like section.key=value: " +
                      assignment);
  }
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  if (!valid_name(section) || !valid_name(key)) {
    throw ConfigError("bad override target: " + assignment);
  }
  set(section, key, assignment.substr(eq + 1));
}

const std::string* ConfigTable::raw(const std::string& section,
                                    const std::string& key) const {
  auto s = entries_.find(section);
  if (s == entries_.end()) return nullptr;
  auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  used_.insert(key_name(section, key));
  return &k->second;
}

bool ConfigTable::has(const std::string& section, const std::string& key) const {
  auto s = entries_.find(section);
  return s != entries_.end() && s->second.count(key) > 0;
}

double ConfigTable::number(const std::string& section, const std::string& key,
                           double fallback) const {
  const std::string* r = raw(section, key);
  const double v = r ? parse_number(*r, key_name(section, key)) : fallback;
  effective_[section][key] = format_number(v);
  return v;
}

long ConfigTable::integer(const std::string& section, const std::string& key,
                          long fallback) const {
  const std::string* r = raw(section, key);
  long v = fallback;
  if (r) {
    const double d = parse_number(*r, key_name(section, key));
    if (d != double(long(d))) {
      throw ConfigError(key_name(section, key) + ": expected an integer");
    }
    v = long(d);
  }
  effective_[section][key] = std::to_string(v);
  return v;
}

bool ConfigTable::boolean(const std::string& section, const std::string& key,
                          bool fallback) const {
  const std::string* r = raw(section, key);
  bool v = fallback;
  if (r) {
    if (*r == "true") {
      v = true;
    } else if (*r == "false") {
      v = false;
    } else {
      throw ConfigError(key_name(section, key) + ": expected true or false");
    }
  }
  effective_[section][key] = v ? "true" : "false";
  return v;
}

std::string ConfigTable::string(const std::string& section,
                                const std::string& key,
                                const std::string& fallback) const {
  const std::string* r = raw(section, key);
  std::string v = fallback;
  if (r) {
    if (r->size() < 2 || r->front() != '"' || r->back() != '"') {
      throw ConfigError(key_name(section, key) + ": expected a quoted string");
    }
    v = r->substr(1, r->size() - 2);
  }
  effective_[section][key] = quote(v);
  return v;
}

std::vector<double> ConfigTable::numbers(
    const std::string& section, const std::string& key,
    const std::vector<double>& fallback) const {
  const std::string* r = raw(section, key);
  std::vector<double> v = fallback;
  if (r) {
    v.clear();
    const std::string s = trim(*r);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
      v.push_back(parse_number(s, key_name(section, key)));
    } else {
      std::stringstream items(s.substr(1, s.size() - 2));
      std::string item;
      while (std::getline(items, item, ',')) {
        if (trim(item).empty()) continue;
        v.push_back(parse_number(item, key_name(section, key)));
      }
    }
  }
  std::string text = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    text += (i ? ", " : "") + format_number(v[i]);
  }
  effective_[section][key] = text + "]";
  return v;
}

std::vector<std::string> ConfigTable::unused() const {
  std::vector<std::string> out;
  for (const auto& [section, keys] : entries_) {
    for (const auto& [key, value] : keys) {
      if (!used_.count(key_name(section, key))) {
        out.push_back(key_name(section, key));
      }
    }
  }
  return out;
}

ConfigTable ConfigTable::resolved() const {
  ConfigTable t;
  t.entries_ = effective_;
  return t;
}

std::string ConfigTable::to_toml() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [section, keys] : entries_) {
    if (!first) out << "\n";
    first = false;
    out << "[" << section << "]\n";
    for (const auto& [key, value] : keys) out << key << " = " << value << "\n";
  }
  return out.str();
}

namespace {

Vec to_vec(const std::vector<double>& v) {
  Vec out(Eigen::Index(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[Eigen::Index(i)] = v[i];
  return out;
}

BonusMode parse_bonus_mode(const std::string& s) {
  if (s == "practical") return BonusMode::kPractical;
  if (s == "theoretical") return BonusMode::kTheoretical;
  throw ConfigError("bonus.mode must be \"practical\" or \"theoretical\"");
}

}  // namespace

Experiment make_experiment(ConfigTable t) {
  if (const char* seed = std::getenv("APL_SEED")) {
    t.set("learner", "seed", seed);
  }
  Experiment ex;
  ex.env_name = t.string("env", "name", "mean_revert");
  if (ex.env_name == "mean_revert_1d") ex.env_name = "mean_revert";
  if (ex.env_name == "mean_revert") {
    MeanRevertParams p;
    p.mu0 = t.number("env", "mu0", p.mu0);
    p.mean_reversion = t.number("env", "mean_reversion", p.mean_reversion);
    p.action_gain = t.number("env", "action_gain", p.action_gain);
    p.sigma = t.number("env", "sigma", p.sigma);
    p.action_lo = t.number("env", "action_lo", p.action_lo);
    p.action_hi = t.number("env", "action_hi", p.action_hi);
    p.x1 = t.number("env", "x1", p.x1);
    p.reward_variance = t.number("env", "reward_variance", p.reward_variance);
    p.horizon = int(t.integer("env", "horizon", p.horizon));
    p.dt = t.number("env", "dt", p.dt);
    p.theta = t.number("env", "theta", p.reward_variance);
    ex.env = build_mean_revert_env(p);
  } else if (ex.env_name == "portfolio") {
    PortfolioParams p;
    p.n_assets = int(t.integer("env", "n_assets", p.n_assets));
    p.r0 = t.number("env", "r0", p.r0);
    p.b = t.number("env", "b", p.b);
    p.sigma = t.number("env", "sigma", p.sigma);
    p.nu = t.number("env", "nu", p.nu);
    p.x1 = t.number("env", "x1", p.x1);
    p.horizon = int(t.integer("env", "horizon", p.horizon));
    p.dt = t.number("env", "dt", p.dt);
    p.lipschitz_radius = t.number("env", "lipschitz_radius", p.lipschitz_radius);
    ex.env = build_portfolio_env(p);
  } else {
    throw ConfigError("env.name must be \"mean_revert\" or \"portfolio\"");
  }
  const EnvSpec& spec = ex.env->spec();

  RunConfig& rc = ex.run;
  rc.partition.rho = t.number("partition", "rho", 1.0);
  rc.partition.big_d = t.number("partition", "big_d", 1.0);
  rc.partition.simplex_state_side =
      t.number("partition", "simplex_state_side", 0.0);

  BonusConfig& b = rc.bonus;
  b.mode = parse_bonus_mode(t.string("bonus", "mode", "practical"));
  b.conf_scale = t.number("bonus", "conf_scale", b.conf_scale);
  b.ucb_scale = t.number("bonus", "ucb_scale", b.ucb_scale);
  b.bias_scale = t.number("bonus", "bias_scale", b.bias_scale);
  b.delta = t.number("bonus", "delta", b.delta);
  b.d1 = t.number("bonus", "d1", b.d1);
  b.d2 = t.number("bonus", "d2", b.d2);
  b.d3 = t.number("bonus", "d3", b.d3);
  b.lambda = t.number("bonus", "lambda", b.lambda);
  if (b.mode == BonusMode::kTheoretical && !t.has("bonus", "c_bar_max")) {
    throw ConfigError("theoretical mode requires bonus.c_bar_max");
  }
  b.c_bar_max = t.number("bonus", "c_bar_max", b.c_bar_max);
  b.c_hat_max = t.number("bonus", "c_hat_max", b.c_hat_max);

  ValueConfig& v = rc.value;
  v.c_tilde = t.number("value", "c_tilde", v.c_tilde);
  v.c_bar = t.number("value", "c_bar", v.c_bar);
  v.mc_samples = int(t.integer("value", "mc_samples", v.mc_samples));
  const std::string anchor = t.string("value", "anchor", "block_center");
  if (anchor == "block_center") {
    v.anchor = Anchor::kBlockCenter;
  } else if (anchor == "last_state") {
    v.anchor = Anchor::kLastState;
  } else {
    throw ConfigError("value.anchor must be \"block_center\" or \"last_state\"");
  }
  const std::string init = t.string("value", "init", "standard");
  if (init == "standard") {
    v.init = InitMode::kStandard;
  } else if (init == "rho_bound") {
    v.init = InitMode::kRhoBound;
  } else {
    throw ConfigError("value.init must be \"standard\" or \"rho_bound\"");
  }

  rc.episodes = t.integer("learner", "episodes", 1);
  const long seed = t.integer("learner", "seed", 1);
  if (seed < 0) throw ConfigError("learner.seed must be nonnegative");
  rc.seed = std::uint64_t(seed);
  rc.doubling.enabled = t.boolean("learner", "doubling", false);
  rc.doubling.k0 = t.integer("learner", "k0", 1);
  rc.doubling.rounds = int(t.integer("learner", "rounds", 1));
  if (!rc.doubling.enabled && rc.episodes < 1) {
    throw ConfigError("learner.episodes must be >= 1");
  }

  OracleConfig& o = ex.oracle;
  const double r = rc.partition.rho;
  o.grid.state_lo =
      to_vec(t.numbers("oracle", "state_lo", std::vector<double>(spec.d_s, -r)));
  o.grid.state_hi =
      to_vec(t.numbers("oracle", "state_hi", std::vector<double>(spec.d_s, r)));
  for (double n : t.numbers("oracle", "state_points",
                            std::vector<double>(spec.d_s, 201))) {
    o.grid.state_points.push_back(int(n));
  }
  o.grid.action_points = int(t.integer("oracle", "action_points", 101));
  o.grid.simplex_resolution = int(t.integer("oracle", "simplex_resolution", 5));
  o.grid.gh_order = int(t.integer("oracle", "gh_order", 16));
  const std::string mode = t.string("oracle", "regret_mode", "realized");
  if (mode == "realized") {
    o.regret_mode = RegretMode::kRealized;
  } else if (mode == "rollout") {
    o.regret_mode = RegretMode::kRollout;
  } else {
    throw ConfigError("oracle.regret_mode must be \"realized\" or \"rollout\"");
  }
  o.rollouts = int(t.integer("oracle", "rollouts", o.rollouts));
  o.window = t.number("oracle", "window", o.window);
  o.gbar.c_hat_max = t.number("oracle", "c_hat_max", b.c_hat_max);
  o.gbar.c_bar_max = t.number("oracle", "c_bar_max", b.c_bar_max);
  o.gbar.c_tilde_max = t.number("oracle", "c_tilde_max", v.c_tilde);
  o.gbar.c_max = t.number("oracle", "c_max", 0.0);
  o.packing_radii = t.numbers("oracle", "packing_radii", o.packing_radii);

  const auto unused = t.unused();
  if (!unused.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unused) msg += " " + k;
    throw ConfigError(msg);
  }
  ex.resolved_toml = t.resolved().to_toml();
  return ex;
}

Experiment load_experiment(const std::string& path,
                           const std::vector<std::string>& overrides) {
  ConfigTable t = ConfigTable::load(path);
  for (const auto& o : overrides) t.apply_override(o);
  return make_experiment(std::move(t));
}

}  // namespace apl
