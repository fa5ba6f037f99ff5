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


#include "apl/invariants.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "apl/io.hpp"

namespace apl {

namespace {

void fail(InvariantCheck& c, const std::string& what) {
  if (c.violations == 0) c.detail = what;
  ++c.violations;
}

bool box_contains(const Vec& lo, const Vec& hi, const Vec& x) {
  return ((x.array() >= lo.array()) && (x.array() <= hi.array())).all();
}

}  // namespace

void EpisodeMonitor::operator()(long episode, const Learner& learner) {
  const auto& trees = learner.trees();
  if (prev_.size() != trees.size()) prev_.assign(trees.size(), Snapshot{});
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const PartitionTree& tree = trees[i];
    const int h = tree.h();

    const double roots = tree.root_volume();
    const double leaves = tree.leaf_volume();
    ++volume_.checked;
    if (std::abs(leaves - roots) > 1e-9 * roots) {
      std::ostringstream msg;
      msg << "episode " << episode << " h=" << h << ": leaves " << leaves
          << " vs roots " << roots;
      fail(volume_, msg.str());
    }

    Snapshot now;
    now.cells = tree.cells();
    now.outside = tree.outside_count();
    now.counts.reserve(tree.size());
    for (const auto& b : tree.blocks()) now.counts.push_back(b.count);

    Snapshot& before = prev_[i];
    if (episode > 1 && !before.counts.empty()) {
      long grown = now.outside - before.outside;
      for (std::size_t id = 0; id < before.counts.size(); ++id) {
        grown += now.counts[id] - before.counts[id];
      }
      ++counts_.checked;
      if (grown != 1) {
        std::ostringstream msg;
        msg << "episode " << episode << " h=" << h << ": counts grew by "
            << grown;
        fail(counts_, msg.str());
      }
      for (const auto& cell : now.cells) {
        const Vec x = cell.center();
        for (const auto& old : before.cells) {
          if (!box_contains(old.lo, old.hi, x)) continue;
          ++monotone_.checked;
          if (cell.v_tilde > old.v_tilde + 1e-9 * (1.0 + std::abs(old.v_tilde))) {
            std::ostringstream msg;
            msg << "episode " << episode << " h=" << h << ": "
                << cell.v_tilde << " > " << old.v_tilde;
            fail(monotone_, msg.str());
          }
          break;
        }
      }
    }
    before = std::move(now);
  }
}

std::vector<InvariantCheck> EpisodeMonitor::checks() const {
  return {volume_, monotone_, counts_};
}

std::vector<InvariantCheck> trace_invariants(const TrainingResult& run,
                                             const Bonus& bonus) {
  InvariantCheck sound{"split iff conf <= diam", 0, 0, ""};
  InvariantCheck n_max{"n-max bound", 0, 0, ""};
  InvariantCheck n_min{"n-min bound", 0, 0, ""};
  InvariantCheck avg{"ancestor diameter average <= 4 diam", 0, 0, ""};
  InvariantCheck avg_sq{"ancestor squared diameter average <= 4 D diam", 0, 0, ""};
  InvariantCheck replay{"statistics replay", 0, 0, ""};
  const auto& trees = run.trees;
  const bool theoretical = bonus.mode() == BonusMode::kTheoretical;

  auto root_norm = [&](const PartitionTree& tree, const Block& b) {
    return tree.block(b.root).state_center().norm();
  };

  // visits[h][id] and the per-visit transition sums, in episode order.
  std::vector<std::map<int, long>> visits(trees.size());
  for (const auto& r : run.trace.steps) {
    if (r.block_id == kOutside) {
      if (r.split) fail(sound, "sentinel split");
      continue;
    }
    const PartitionTree& tree = trees.at(r.h - 1);
    ++sound.checked;
    if (r.split != (r.conf <= r.diam)) {
      std::ostringstream msg;
      msg << "episode " << r.episode << " h=" << r.h << " block "
          << r.block_id << ": conf " << r.conf << " diam " << r.diam
          << " split " << r.split;
      fail(sound, msg.str());
    }
    ++visits[r.h - 1][r.block_id];
    if (theoretical && !r.split) {
      const Block& b = tree.block(r.block_id);
      const double g = bonus.g1(root_norm(tree, b));
      ++n_max.checked;
      if (!(double(r.count) < std::pow(g / r.diam, 2))) {
        std::ostringstream msg;
        msg << "block " << r.block_id << " count " << r.count;
        fail(n_max, msg.str());
      }
    }
  }

  for (std::size_t i = 0; i < trees.size(); ++i) {
    const PartitionTree& tree = trees[i];
    const double big_d = tree.big_d();
    for (const auto& b : tree.blocks()) {
      if (theoretical && b.parent >= 0) {
        const double g = bonus.g1(root_norm(tree, b));
        ++n_min.checked;
        if (!(double(b.count) >= std::pow(g / (2.0 * b.diam()), 2) *
                                     (1.0 - 1e-12))) {
          std::ostringstream msg;
          msg << "h=" << tree.h() << " block " << b.id << " count " << b.count;
          fail(n_min, msg.str());
        }
      }
      if (b.count == 0) continue;
      double sum = 0.0, sum_sq = 0.0;
      long n = 0;
      for (int id = b.id; id >= 0; id = tree.block(id).parent) {
        const auto it = visits[i].find(id);
        if (it == visits[i].end()) continue;
        const double d = tree.block(id).diam();
        n += it->second;
        sum += d * double(it->second);
        sum_sq += d * d * double(it->second);
      }
      const double diam = b.diam();
      if (n != b.count) {
        std::ostringstream msg;
        msg << "h=" << tree.h() << " block " << b.id << ": chain visits " << n
            << " vs count " << b.count;
        fail(avg, msg.str());
        continue;
      }
      ++avg.checked;
      ++avg_sq.checked;
      if (sum / double(n) > 4.0 * diam * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "h=" << tree.h() << " block " << b.id << ": "
            << sum / double(n) << " > 4 * " << diam;
        fail(avg, msg.str());
      }
      if (sum_sq / double(n) > 4.0 * big_d * diam * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "h=" << tree.h() << " block " << b.id << ": "
            << sum_sq / double(n) << " > 4 D * " << diam;
        fail(avg_sq, msg.str());
      }
    }
  }

  // Rebuild every block's sums from the trace: a block holds the visits of
  // its ancestor chain up to its creation plus its own.
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const PartitionTree& tree = trees[i];
    std::vector<BlockStats> rebuilt(tree.size(), BlockStats(tree.d_s()));
    std::vector<std::vector<const StepRecord*>> own(tree.size());
    for (const auto& r : run.trace.steps) {
      if (r.h == tree.h() && r.block_id != kOutside) {
        own[std::size_t(r.block_id)].push_back(&r);
      }
    }
    for (const auto& b : tree.blocks()) {
      if (b.parent >= 0) rebuilt[std::size_t(b.id)] = rebuilt[std::size_t(b.parent)];
      for (const StepRecord* r : own[std::size_t(b.id)]) {
        record_visit(rebuilt[std::size_t(b.id)], r->next_state - r->state,
                     r->reward);
      }
    }
    for (const auto& b : tree.blocks()) {
      // Children are created at the split visit, after their parent recorded
      // it, so ids are already in creation order.
      const BlockStats& want = rebuilt[std::size_t(b.id)];
      ++replay.checked;
      const bool same = want.n == b.stats.n && want.sum_r == b.stats.sum_r &&
                        want.sum_dx == b.stats.sum_dx &&
                        want.sum_dx_outer == b.stats.sum_dx_outer;
      if (!same) {
        std::ostringstream msg;
        msg << "h=" << tree.h() << " block " << b.id << ": n " << b.stats.n
            << " vs replay " << want.n;
        fail(replay, msg.str());
      }
    }
  }

  if (!theoretical) {
    n_max.detail = n_min.detail = "practical bonus mode";
  }
  return {sound, n_max, n_min, avg, avg_sq, replay};
}

std::vector<InvariantCheck> verify_invariants(
    std::shared_ptr<const Environment> env, const RunConfig& cfg) {
  if (cfg.doubling.enabled) {
    throw ConfigError("invariant checks need learner.doubling = false");
  }
  EpisodeMonitor monitor;
  const TrainingResult first =
      run_training(env, cfg, [&](long k, const Learner& l) { monitor(k, l); });
  const Bonus bonus(env->spec(), [&] {
    BonusConfig b = cfg.bonus;
    b.k_total = cfg.episodes;
    return b;
  }(), first.trees.front().big_d());
  std::vector<InvariantCheck> out = trace_invariants(first, bonus);
  for (auto& c : monitor.checks()) out.push_back(c);

  const TrainingResult second = run_training(env, cfg);
  InvariantCheck det{"determinism", 0, 0, ""};
  det.checked = 1;
  if (trace_csv(first.trace) != trace_csv(second.trace)) {
    fail(det, "traces differ");
  } else {
    for (std::size_t i = 0; i < first.trees.size(); ++i) {
      if (partition_json(first.trees[i], true) !=
          partition_json(second.trees[i], true)) {
        fail(det, "partitions differ at h=" + std::to_string(i + 1));
        break;
      }
    }
  }
  out.push_back(det);
  return out;
}

}  // namespace apl
