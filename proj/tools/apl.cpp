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


#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "apl/config.hpp"
#include "apl/invariants.hpp"
#include "apl/io.hpp"
#include "apl/plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace apl;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Loads a config file or the snapshot stored in a run manifest.
Experiment load(const std::string& config, const std::string& manifest,
                std::vector<std::string> overrides, long seed) {
  if (seed >= 0) {
    unsetenv("APL_SEED");
    overrides.push_back("learner.seed=" + std::to_string(seed));
  }
  if (!manifest.empty()) {
    // A manifest pins its own seed.
    unsetenv("APL_SEED");
    const json m = json::parse(read_file(manifest));
    ConfigTable t = ConfigTable::parse(m.at("config_toml").get<std::string>(),
                                       manifest);
    for (const auto& o : overrides) t.apply_override(o);
    return make_experiment(std::move(t));
  }
  if (config.empty()) throw ConfigError("--config or --manifest is required");
  return load_experiment(config, overrides);
}

Experiment load_run(const std::string& dir) {
  return load("", (fs::path(dir) / "manifest.json").string(), {}, -1);
}

std::string dp_key(const Experiment& ex) {
  const ConfigTable t = ConfigTable::parse(ex.resolved_toml);
  ConfigTable sub;
  static const std::set<std::string> grid_keys{
      "state_lo", "state_hi", "state_points", "action_points",
      "simplex_resolution", "gh_order"};
  for (const char* section : {"env", "oracle"}) {
    const auto it = t.entries().find(section);
    if (it == t.entries().end()) continue;
    for (const auto& [k, v] : it->second) {
      if (section == std::string("env") || grid_keys.count(k)) {
        sub.set(section, k, v);
      }
    }
  }
  return git_blob_hash(sub.to_toml());
}

DpSolution solve_or_load(const Experiment& ex, const std::string& path) {
  const std::string key = dp_key(ex);
  if (!path.empty() && fs::exists(path)) {
    const json j = json::parse(read_file(path));
    if (j.value("key", "") == key) return dp_from_json(j);
    std::cerr << "note: " << path << " was solved for another config\n";
  }
  DpSolution dp = dp_solve(*ex.env, ex.oracle.grid);
  for (const auto& w : dp.warnings) std::cerr << "warning: " << w << "\n";
  if (!path.empty()) write_file(path, dp_json(dp, key).dump() + "\n");
  return dp;
}

std::string values_csv(const std::vector<double>& values, double baseline) {
  std::ostringstream out;
  out << "episode,value,baseline\n";
  char buf[80];
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k + 1, values[k],
                  baseline);
    out << buf;
  }
  return out.str();
}

struct RunArgs {
  std::string config, manifest, out;
  std::vector<std::string> overrides;
  long seed = -1;
  bool with_stats = false;
};

int cmd_run(const RunArgs& a) {
  const Experiment ex = load(a.config, a.manifest, a.overrides, a.seed);
  const ConfigTable resolved = ConfigTable::parse(ex.resolved_toml);
  const long seed = resolved.integer("learner", "seed", 1);
  std::string out = a.out;
  if (out.empty()) {
    const std::string stem =
        a.config.empty() ? ex.env_name : fs::path(a.config).stem().string();
    out = "out/" + stem + "_seed" + std::to_string(seed);
  }
  fs::create_directories(fs::path(out) / "partitions");
  const std::string started = utc_now();

  json manifest;
  manifest["config_path"] = a.config.empty() ? a.manifest : a.config;
  manifest["config_toml"] = ex.resolved_toml;
  manifest["config_hash"] = git_blob_hash(ex.resolved_toml);
  manifest["env"] = ex.env_name;
  manifest["seeds"] = {seed};
  manifest["started_at"] = started;
  json layout = {{"trace", "trace.csv"},
                 {"returns", "returns.csv"},
                 {"partitions", "partitions/h<h>.json"}};

  const bool rollout = ex.oracle.regret_mode == RegretMode::kRollout;
  std::vector<double> values;
  std::unique_ptr<DpSolution> dp;
  std::unique_ptr<PairedEvaluator> paired;
  EpisodeHook hook;
  if (rollout) {
    dp = std::make_unique<DpSolution>(
        solve_or_load(ex, (fs::path(out) / "dp.json").string()));
    paired = std::make_unique<PairedEvaluator>(ex.env, *dp, ex.oracle.rollouts,
                                               99);
    hook = [&](long, const Learner& l) {
      values.push_back(paired->policy_value(l));
    };
    layout["dp"] = "dp.json";
    layout["policy_values"] = "policy_values.csv";
  }
  manifest["layout"] = layout;

  TrainingResult result;
  int code = 0;
  try {
    run_training(ex.env, ex.run, result, hook);
    manifest["status"] = "complete";
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    manifest["status"] = "partial";
    manifest["error"] = e.what();
    code = 3;
  }

  json hashes;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file((fs::path(out) / name).string(), content);
    hashes[name] = git_blob_hash(content);
  };
  emit("trace.csv", trace_csv(result.trace));
  emit("returns.csv", returns_csv(result.trace));
  if (rollout) emit("policy_values.csv", values_csv(values, paired->baseline()));
  for (const auto& tree : result.trees) {
    emit("partitions/h" + std::to_string(tree.h()) + ".json",
         partition_json(tree, a.with_stats).dump(1) + "\n");
  }
  if (!result.trees.empty()) {
    std::vector<bool> updated(result.values.updated.begin() + 1,
                              result.values.updated.end());
    manifest["value_updated"] = updated;
  }
  manifest["episodes"] = result.trace.returns.size();
  manifest["artifact_hashes"] = hashes;
  manifest["finished_at"] = utc_now();
  write_file((fs::path(out) / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << out << "\n";
  return code;
}

int cmd_oracle(const std::string& config, const std::vector<std::string>& ov,
               const std::string& out) {
  const Experiment ex = load(config, "", ov, -1);
  const auto t0 = std::chrono::steady_clock::now();
  const DpSolution dp = solve_or_load(ex, out);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  Rng rng(0);
  const Vec x1 = ex.env->sample_initial(rng);
  json j = {{"key", dp_key(ex)},
            {"v_star_1", dp.v_star(1, x1)},
            {"x1", std::vector<double>(x1.data(), x1.data() + x1.size())},
            {"greedy_action_1",
             std::vector<double>(dp.policy_action(1, x1).data(),
                                 dp.policy_action(1, x1).data() +
                                     dp.policy_action(1, x1).size())},
            {"seconds", secs}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct RegretArgs {
  std::string run, trace, dp, config, policy_values, out;
  double window = -1.0;
};

// Builds the regret report of a run; fills fit and prints nothing.
RegretReport compute_regret(const RegretArgs& a, SlopeFit& fit,
                            Experiment& ex) {
  std::string trace = a.trace, dp_path = a.dp, pv = a.policy_values;
  if (!a.run.empty()) {
    ex = load_run(a.run);
    const fs::path dir(a.run);
    if (trace.empty()) trace = (dir / "trace.csv").string();
    if (dp_path.empty()) dp_path = (dir / "dp.json").string();
    if (pv.empty() && fs::exists(dir / "policy_values.csv")) {
      pv = (dir / "policy_values.csv").string();
    }
  } else if (!a.config.empty()) {
    ex = load(a.config, "", {}, -1);
  } else if (!dp_path.empty() && fs::exists(dp_path)) {
    ex = Experiment{};
  } else {
    throw ConfigError("regret needs --run, --config, or an existing --dp file");
  }
  if (trace.empty()) throw ConfigError("regret needs --trace or --run");
  const TraceSummary s = read_trace_csv(read_file(trace));
  const DpSolution dp = ex.env ? solve_or_load(ex, dp_path)
                               : dp_from_json(json::parse(read_file(dp_path)));
  RegretReport report;
  if (!pv.empty()) {
    std::istringstream in(read_file(pv));
    std::string line;
    std::getline(in, line);
    std::vector<double> values;
    double baseline = 0.0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      double k, v, b;
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &k, &v, &b) != 3) {
        throw DataError("bad row in " + pv);
      }
      values.push_back(v);
      baseline = b;
    }
    report = paired_regret(s.initial_states, values, baseline, dp);
  } else {
    report = regret_curve(s.initial_states, s.returns, dp);
  }
  const double window =
      a.window > 0.0 ? a.window : (ex.env ? ex.oracle.window : 0.5);
  fit = loglog_slope(report.cumulative, window);
  return report;
}

int cmd_regret(const RegretArgs& a) {
  SlopeFit fit;
  Experiment ex;
  const RegretReport report = compute_regret(a, fit, ex);
  std::string out = a.out;
  if (out.empty() && !a.run.empty()) {
    out = (fs::path(a.run) / "regret.csv").string();
  }
  if (!out.empty()) write_file(out, regret_csv(report));
  std::cout << slope_json(fit).dump() << "\n";
  return 0;
}

int cmd_coverage(const CoverageConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cells = empirical_coverage(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  bool ok = true;
  std::printf("%4s %6s %12s %12s %10s %10s %s\n", "d_s", "n", "kappa_mu",
              "kappa_sigma", "cov_mu", "cov_sigma", "status");
  for (const auto& c : cells) {
    const bool pass = c.coverage_mu >= 1.0 - cfg.delta &&
                      c.coverage_sigma >= 1.0 - cfg.delta;
    ok = ok && pass;
    std::printf("%4d %6ld %12.5g %12.5g %10.4f %10.4f %s\n", c.d_s, c.n,
                c.kappa_mu, c.kappa_sigma, c.coverage_mu, c.coverage_sigma,
                pass ? "ok" : "FAIL");
  }
  std::printf("target >= %.3f, %ld trials, %.1fs\n", 1.0 - cfg.delta,
              cfg.trials, secs);
  return ok ? 0 : 1;
}

int cmd_invariants(const std::string& config, const std::vector<std::string>& ov,
                   long episodes) {
  std::vector<std::string> overrides = ov;
  if (episodes > 0) {
    overrides.push_back("learner.episodes=" + std::to_string(episodes));
  }
  const Experiment ex = load(config, "", overrides, -1);
  const auto checks = verify_invariants(ex.env, ex.run);
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.passed();
    std::printf("%-48s %-5s checked %-8ld violations %ld%s%s\n", c.name.c_str(),
                c.skipped() ? "skip" : (c.passed() ? "ok" : "FAIL"), c.checked,
                c.violations, c.detail.empty() ? "" : "  ", c.detail.c_str());
  }
  return ok ? 0 : 1;
}

int cmd_packing(const std::string& config, const std::vector<std::string>& ov,
                int h, const std::string& dp_path) {
  const Experiment ex = load(config, "", ov, -1);
  const EnvSpec& spec = ex.env->spec();
  const DpSolution dp = solve_or_load(ex, dp_path);
  BonusConfig bc = ex.run.bonus;
  bc.k_total = ex.run.episodes;
  // The threshold uses the theoretical g2 whatever mode the learner ran in.
  bc.mode = BonusMode::kTheoretical;
  if (bc.c_bar_max <= 0.0) bc.c_bar_max = ex.oracle.gbar.c_bar_max;
  if (bc.lambda <= 0.0 && spec.reg.lambda <= 0.0) bc.lambda = 1.0;
  const Bonus bonus(spec, bc, ex.run.partition.big_d);
  const auto gbar =
      make_gbar(bonus, ex.oracle.gbar, spec.reg.m, ex.run.partition.big_d);
  PackingConfig pc;
  pc.rho = ex.run.partition.rho;
  pc.big_d = ex.run.partition.big_d;
  pc.radii = ex.oracle.packing_radii;
  if (h < 1) h = spec.horizon;
  const auto results = near_optimal_packing(*ex.env, dp, h, pc, gbar);
  std::printf("%8s %12s %10s %14s\n", "r", "near_opt", "N_r", "ceiling");
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && double(r.packing_number) <= r.ceiling;
    std::printf("%8.4g %12ld %10ld %14.6g\n", r.r, r.near_optimal_points,
                r.packing_number, r.ceiling);
  }
  std::printf("zooming dimension estimate %.4f\n", packing_dimension(results));
  return ok ? 0 : 1;
}

int cmd_export(const std::string& run, int h, const std::string& out) {
  const Experiment ex = load_run(run);
  const fs::path file = fs::path(run) / "partitions" / ("h" + std::to_string(h) + ".json");
  const json original = json::parse(read_file(file.string()));
  const PartitionTree tree = partition_from_json(ex.env->spec(), original);
  const bool stats = !original.at("blocks").empty() &&
                     original.at("blocks")[0].contains("stats");
  const std::string text = partition_json(tree, stats).dump(1) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return 0;
}

int cmd_plot(const std::string& run, const std::string& out_dir, int h) {
  const Experiment ex = load_run(run);
  const fs::path out = out_dir.empty() ? fs::path(run) / "plots" : fs::path(out_dir);
  fs::create_directories(out);
  const TraceSummary s =
      read_trace_csv(read_file((fs::path(run) / "trace.csv").string()));

  Series returns{"return", {}, {}};
  for (std::size_t k = 0; k < s.returns.size(); ++k) {
    returns.x.push_back(double(k + 1));
    returns.y.push_back(s.returns[k]);
  }
  ChartOptions opt;
  opt.title = ex.env_name + ": return per episode";
  opt.x_label = "episode";
  opt.y_label = "return";
  write_file((out / "returns.svg").string(), line_chart_svg({returns}, opt));

  RegretArgs ra;
  ra.run = run;
  SlopeFit fit;
  Experiment tmp;
  const RegretReport report = compute_regret(ra, fit, tmp);
  Series cum{"cumulative regret", returns.x, report.cumulative};
  Series clamped{"clamped increments", returns.x, report.cumulative_clamped};
  opt.title = ex.env_name + ": cumulative regret";
  opt.y_label = "cumulative regret";
  write_file((out / "regret.svg").string(), line_chart_svg({cum, clamped}, opt));
  write_file((out / "loglog.svg").string(),
             loglog_svg(report.cumulative, fit, ex.env_name + ": log-log regret"));

  const EnvSpec& spec = ex.env->spec();
  if (spec.d_s == 1 && spec.d_a == 1) {
    if (h < 1) h = std::max(1, spec.horizon - 1);
    const fs::path file =
        fs::path(run) / "partitions" / ("h" + std::to_string(h) + ".json");
    const PartitionTree tree =
        partition_from_json(spec, json::parse(read_file(file.string())));
    write_file((out / ("partition_h" + std::to_string(h) + ".svg")).string(),
               partition_svg(tree, ex.env_name + ": partition at h=" +
                                       std::to_string(h)));
  }
  std::cout << out.string() << "\n";
  return 0;
}

int cmd_value(const std::string& run, int h, const std::vector<double>& coords) {
  const Experiment ex = load_run(run);
  const EnvSpec& spec = ex.env->spec();
  if (h < 1 || h > spec.horizon) throw ConfigError("--h out of range");
  if (int(coords.size()) != spec.d_s) {
    throw ConfigError("--x needs " + std::to_string(spec.d_s) + " coordinates");
  }
  const json manifest =
      json::parse(read_file((fs::path(run) / "manifest.json").string()));
  const fs::path file =
      fs::path(run) / "partitions" / ("h" + std::to_string(h) + ".json");
  const PartitionTree tree =
      partition_from_json(spec, json::parse(read_file(file.string())));
  ValueState vs = make_value_state(spec, ex.run.value, tree.rho(), tree.big_d());
  if (manifest.contains("value_updated")) {
    const auto flags = manifest.at("value_updated").get<std::vector<bool>>();
    for (std::size_t i = 0; i < flags.size(); ++i) vs.updated[i + 1] = flags[i];
  }
  Vec x(spec.d_s);
  for (int i = 0; i < spec.d_s; ++i) x[i] = coords[std::size_t(i)];
  const VBar vbar(tree, vs);
  double q_max = -std::numeric_limits<double>::infinity();
  int best = kOutside;
  for (int id : tree.relevant(x)) {
    const double q = id == kOutside ? tree.outside_q() : tree.block(id).q_bar;
    if (q > q_max) q_max = q, best = id;
  }
  json j = {{"h", h}, {"x", coords}, {"v_bar", vbar(x)},
            {"max_q_bar", q_max}, {"argmax_block", best}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive partition learning for controlled diffusions"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "train the learner and write artifacts");
  run->add_option("--config", run_args.config, "TOML config");
  run->add_option("--manifest", run_args.manifest, "re-run from a manifest");
  run->add_option("--out", run_args.out, "output directory");
  run->add_option("--seed", run_args.seed, "seed (overrides APL_SEED)");
  run->add_option("--override", run_args.overrides, "section.key=value");
  run->add_flag("--with-stats", run_args.with_stats,
                "include block statistics in partition JSON");

  std::string oracle_config, oracle_out;
  std::vector<std::string> oracle_ov;
  auto* oracle = app.add_subcommand("oracle", "solve the DP oracle");
  oracle->add_option("--config", oracle_config)->required();
  oracle->add_option("--override", oracle_ov);
  oracle->add_option("--out", oracle_out, "DP JSON cache");

  RegretArgs regret_args;
  auto* regret = app.add_subcommand("regret", "regret curve and log-log slope");
  regret->add_option("--run", regret_args.run, "run directory");
  regret->add_option("--trace", regret_args.trace);
  regret->add_option("--dp", regret_args.dp, "DP JSON (solved and cached if absent)");
  regret->add_option("--config", regret_args.config);
  regret->add_option("--policy-values", regret_args.policy_values);
  regret->add_option("--window", regret_args.window);
  regret->add_option("--out", regret_args.out, "regret CSV");

  auto* verify = app.add_subcommand("verify", "property checks");
  verify->require_subcommand(1);
  CoverageConfig cov;
  auto* coverage = verify->add_subcommand("coverage", "concentration coverage");
  coverage->add_option("--delta", cov.delta);
  coverage->add_option("--trials", cov.trials);
  coverage->add_option("--dims", cov.dims);
  coverage->add_option("--sizes", cov.sizes);
  coverage->add_option("--dt", cov.dt);
  coverage->add_option("--eta", cov.eta);
  coverage->add_option("--d1", cov.d1);
  coverage->add_option("--d2", cov.d2);
  coverage->add_option("--d3", cov.d3);
  coverage->add_option("--seed", cov.seed);
  std::string inv_config;
  std::vector<std::string> inv_ov;
  long inv_episodes = 0;
  auto* invariants = verify->add_subcommand("invariants", "trace invariants");
  invariants->add_option("--config", inv_config)->required();
  invariants->add_option("--override", inv_ov);
  invariants->add_option("--episodes", inv_episodes);
  std::string pack_config, pack_dp;
  std::vector<std::string> pack_ov;
  int pack_h = 0;
  auto* packing = verify->add_subcommand("packing", "near-optimal set packing");
  packing->add_option("--config", pack_config)->required();
  packing->add_option("--override", pack_ov);
  packing->add_option("--h", pack_h);
  packing->add_option("--dp", pack_dp);

  std::string export_run, export_out;
  int export_h = 1;
  auto* exp = app.add_subcommand("export", "re-export a partition");
  exp->add_option("--run", export_run)->required();
  exp->add_option("--h", export_h)->required();
  exp->add_option("--out", export_out);

  std::string plot_run, plot_out;
  int plot_h = 0;
  auto* plot = app.add_subcommand("plot", "SVG charts of a run");
  plot->add_option("--run", plot_run)->required();
  plot->add_option("--out", plot_out);
  plot->add_option("--h", plot_h, "partition timestamp");

  std::string value_run;
  int value_h = 1;
  std::vector<double> value_x;
  auto* value = app.add_subcommand("value", "query the value estimate");
  value->add_option("--run", value_run)->required();
  value->add_option("--h", value_h)->required();
  value->add_option("--x", value_x)->required()->delimiter(',');

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_args);
    if (*oracle) return cmd_oracle(oracle_config, oracle_ov, oracle_out);
    if (*regret) return cmd_regret(regret_args);
    if (*coverage) return cmd_coverage(cov);
    if (*invariants) return cmd_invariants(inv_config, inv_ov, inv_episodes);
    if (*packing) return cmd_packing(pack_config, pack_ov, pack_h, pack_dp);
    if (*exp) return cmd_export(export_run, export_h, export_out);
    if (*plot) return cmd_plot(plot_run, plot_out, plot_h);
    if (*value) return cmd_value(value_run, value_h, value_x);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
