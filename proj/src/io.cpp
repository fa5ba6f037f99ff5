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


#include "apl/io.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace apl {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vec json_vec(const json& j) {
  Vec out(Eigen::Index(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    out[Eigen::Index(i)] = j[i].get<double>();
  }
  return out;
}

json mat_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec_json(m.row(r)));
  return out;
}

Mat json_mat(const json& j) {
  if (j.empty()) return Mat();
  Mat out(Eigen::Index(j.size()), Eigen::Index(j[0].size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    out.row(Eigen::Index(r)) = json_vec(j[r]).transpose();
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

std::string trace_csv(const EpisodeTrace& trace) {
  std::ostringstream out;
  out << "episode,h,block_id";
  for (int i = 0; i < trace.d_s; ++i) out << ",state_" << i;
  for (int i = 0; i < trace.d_a; ++i) out << ",action_" << i;
  out << ",reward,conf,diam,split\n";
  for (const auto& r : trace.steps) {
    out << r.episode << ',' << r.h << ',' << r.block_id;
    for (Eigen::Index i = 0; i < r.state.size(); ++i) out << ',' << num(r.state[i]);
    for (Eigen::Index i = 0; i < r.action.size(); ++i) {
      out << ',' << num(r.action[i]);
    }
    out << ',' << num(r.reward) << ',' << num(r.conf) << ',' << num(r.diam)
        << ',' << (r.split ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string returns_csv(const EpisodeTrace& trace) {
  std::ostringstream out;
  out << "episode,return\n";
  long label = 0;
  for (std::size_t k = 0; k < trace.returns.size(); ++k) {
    label = trace.steps.empty()
                ? long(k + 1)
                : trace.steps[k * std::size_t(trace.horizon)].episode;
    out << label << ',' << num(trace.returns[k]) << '\n';
  }
  return out.str();
}

TraceSummary read_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty trace file");
  const auto header = split_csv(line);
  int d_s = 0;
  std::size_t reward_col = 0;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].rfind("state_", 0) == 0) ++d_s;
    if (header[i] == "reward") reward_col = i;
  }
  if (header.size() < 4 || header[0] != "episode" || header[1] != "h" ||
      reward_col == 0 || d_s == 0) {
    throw DataError("trace header is not episode,h,block_id,state...");
  }
  TraceSummary s;
  long current = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) throw DataError("ragged trace row");
    const long episode = std::stol(f[0]);
    if (episode != current) {
      current = episode;
      Vec x(d_s);
      for (int i = 0; i < d_s; ++i) x[i] = std::stod(f[3 + i]);
      s.initial_states.push_back(x);
      s.returns.push_back(0.0);
    }
    s.returns.back() += std::stod(f[reward_col]);
  }
  return s;
}

json partition_json(const PartitionTree& tree, bool with_stats) {
  json j;
  j["h"] = tree.h();
  j["rho"] = tree.rho();
  j["D"] = tree.big_d();
  j["outside_q"] = tree.outside_q();
  j["outside_count"] = tree.outside_count();
  json blocks = json::array();
  for (const auto& b : tree.blocks()) {
    json e;
    e["id"] = b.id;
    e["lo"] = vec_json(b.lo());
    e["hi"] = vec_json(b.hi());
    e["depth"] = b.depth;
    e["parent"] = b.parent;
    e["count"] = b.count;
    e["q_bar"] = b.q_bar;
    e["root"] = b.root;
    e["children"] = b.children;
    if (const auto* s = std::get_if<SimplexCell>(&b.action)) {
      e["vertices"] = mat_json(s->vertices);
    }
    if (with_stats) {
      json st;
      st["n"] = b.stats.n;
      st["sum_dx"] = vec_json(b.stats.sum_dx);
      st["sum_dx_outer"] = mat_json(b.stats.sum_dx_outer);
      st["sum_r"] = b.stats.sum_r;
      e["stats"] = st;
    }
    blocks.push_back(e);
  }
  j["blocks"] = blocks;
  json cells = json::array();
  for (const auto& c : tree.cells()) {
    cells.push_back({{"lo", vec_json(c.lo)},
                     {"hi", vec_json(c.hi)},
                     {"v_tilde", c.v_tilde}});
  }
  j["cells"] = cells;
  return j;
}

PartitionTree partition_from_json(const EnvSpec& spec, const json& j) {
  try {
    std::vector<Block> blocks;
    for (const auto& e : j.at("blocks")) {
      Block b;
      b.id = e.at("id").get<int>();
      b.h = j.at("h").get<int>();
      const Vec lo = json_vec(e.at("lo"));
      const Vec hi = json_vec(e.at("hi"));
      b.state_lo = lo.head(spec.d_s);
      b.state_hi = hi.head(spec.d_s);
      if (e.contains("vertices")) {
        b.action = SimplexCell{json_mat(e.at("vertices"))};
      } else {
        b.action = BoxCell{lo.tail(spec.d_a), hi.tail(spec.d_a)};
      }
      b.depth = e.at("depth").get<int>();
      b.parent = e.at("parent").get<int>();
      b.root = e.at("root").get<int>();
      b.children = e.at("children").get<std::vector<int>>();
      b.count = e.at("count").get<long>();
      b.q_bar = e.at("q_bar").get<double>();
      b.stats = BlockStats(spec.d_s);
      if (e.contains("stats")) {
        const auto& st = e.at("stats");
        b.stats.n = st.at("n").get<long>();
        b.stats.sum_dx = json_vec(st.at("sum_dx"));
        b.stats.sum_dx_outer = json_mat(st.at("sum_dx_outer"));
        b.stats.sum_r = st.at("sum_r").get<double>();
      }
      blocks.push_back(std::move(b));
    }
    std::vector<StateCell> cells;
    for (const auto& c : j.at("cells")) {
      cells.push_back({json_vec(c.at("lo")), json_vec(c.at("hi")),
                       c.at("v_tilde").get<double>()});
    }
    return PartitionTree::from_blocks(
        spec, j.at("h").get<int>(), j.at("rho").get<double>(),
        j.at("D").get<double>(), std::move(blocks), std::move(cells),
        j.at("outside_q").get<double>());
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed partition JSON: ") + e.what());
  }
}

json dp_json(const DpSolution& dp, const std::string& key) {
  json j;
  j["key"] = key;
  j["horizon"] = dp.horizon;
  j["state_lo"] = vec_json(dp.grid_cfg.state_lo);
  j["state_hi"] = vec_json(dp.grid_cfg.state_hi);
  j["state_points"] = dp.grid_cfg.state_points;
  j["action_points"] = dp.grid_cfg.action_points;
  j["simplex_resolution"] = dp.grid_cfg.simplex_resolution;
  j["gh_order"] = dp.grid_cfg.gh_order;
  json actions = json::array();
  for (const auto& a : dp.actions) actions.push_back(vec_json(a));
  j["actions"] = actions;
  j["v"] = dp.v;
  j["policy"] = dp.policy;
  j["warnings"] = dp.warnings;
  return j;
}

DpSolution dp_from_json(const json& j) {
  try {
    DpSolution dp;
    dp.horizon = j.at("horizon").get<int>();
    dp.grid_cfg.state_lo = json_vec(j.at("state_lo"));
    dp.grid_cfg.state_hi = json_vec(j.at("state_hi"));
    dp.grid_cfg.state_points = j.at("state_points").get<std::vector<int>>();
    dp.grid_cfg.action_points = j.at("action_points").get<int>();
    dp.grid_cfg.simplex_resolution = j.at("simplex_resolution").get<int>();
    dp.grid_cfg.gh_order = j.at("gh_order").get<int>();
    dp.grid = StateGrid(dp.grid_cfg.state_lo, dp.grid_cfg.state_hi,
                        dp.grid_cfg.state_points);
    for (const auto& a : j.at("actions")) dp.actions.push_back(json_vec(a));
    dp.v = j.at("v").get<std::vector<std::vector<double>>>();
    dp.policy = j.at("policy").get<std::vector<std::vector<int>>>();
    dp.warnings = j.at("warnings").get<std::vector<std::string>>();
    return dp;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed DP JSON: ") + e.what());
  }
}

std::string regret_csv(const RegretReport& report) {
  std::ostringstream out;
  out << "episode,v_star,return,increment,cumulative\n";
  for (std::size_t k = 0; k < report.increments.size(); ++k) {
    out << k + 1 << ',' << num(report.v_star[k]) << ',' << num(report.returns[k])
        << ',' << num(report.increments[k]) << ',' << num(report.cumulative[k])
        << '\n';
  }
  return out.str();
}

json slope_json(const SlopeFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"r2", fit.r2},
          {"window", fit.window}};
}

std::string git_blob_hash(const std::string& content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob += content;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : digest) {
    out.push_back(hex[c >> 4]);
    out.push_back(hex[c & 15]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
}

}  // namespace apl
