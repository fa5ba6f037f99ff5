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


#include <doctest.h>

#include <cmath>

#include "apl/io.hpp"
#include "apl/learner.hpp"

using namespace apl;

namespace {

RunConfig mean_revert_run(long episodes, std::uint64_t seed = 1) {
  RunConfig rc;
  rc.episodes = episodes;
  rc.seed = seed;
  rc.partition.rho = 10.0;
  rc.partition.big_d = 10.0 * std::sqrt(2.0);
  rc.bonus.conf_scale = 10.0;
  rc.bonus.ucb_scale = 100.0;
  rc.value.c_tilde = 5.0;
  return rc;
}

PartitionTree mean_revert_tree() {
  auto env = build_mean_revert_env();
  PartitionConfig cfg;
  cfg.rho = 10.0;
  cfg.big_d = 10.0 * std::sqrt(2.0);
  return PartitionTree(env->spec(), 1, cfg);
}

}  // namespace

TEST_CASE("select_block takes the larger Q and breaks ties by depth") {
  PartitionTree tree = mean_revert_tree();
  const auto at_zero = tree.relevant(Vec::Constant(1, 0.0));
  REQUIRE(at_zero.size() == 2);
  tree.block(at_zero[0]).q_bar = 5.0;
  tree.block(at_zero[1]).q_bar = 7.0;
  CHECK(select_block(tree, Vec::Constant(1, 0.0)) == at_zero[1]);
  CHECK(select_block(tree, Vec::Constant(1, 12.0)) == kOutside);

  // depth 2 against depth 1 at equal Q
  const int right = tree.relevant(Vec::Constant(1, 4.0)).front();
  for (int k : tree.split(right)) tree.block(k).q_bar = 3.0;
  const int deep_parent = tree.relevant(Vec::Constant(1, 7.0)).front();
  for (int k : tree.split(deep_parent)) tree.block(k).q_bar = 3.0;
  const auto rel = tree.relevant(Vec::Constant(1, 5.0));
  int expected = -1, best_depth = -1;
  for (int id : rel) {
    if (tree.block(id).depth > best_depth) best_depth = tree.block(id).depth, expected = id;
  }
  CHECK(best_depth == 2);
  CHECK(select_block(tree, Vec::Constant(1, 5.0)) == expected);
}

TEST_CASE("uniform actions") {
  PartitionTree tree = mean_revert_tree();
  auto env = build_mean_revert_env();
  const int id = tree.roots().front();
  Rng rng(14);
  const long n = 100000;
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    sum += sample_action(tree, id, env->spec().action_space, rng)[0];
  }
  CHECK(std::abs(sum / n - 5.0) <= 4.0 * (10.0 / std::sqrt(12.0)) / std::sqrt(double(n)));

  auto pf = build_portfolio_env();
  PartitionConfig pc;
  pc.rho = 10.0;
  PartitionTree simplex(pf->spec(), 1, pc);
  const int root = simplex.roots().front();
  const auto kids = simplex.split(root);
  for (int k : {root, kids.back(), kOutside}) {
    for (int i = 0; i < 2000; ++i) {
      const Vec a = sample_action(simplex, k, pf->spec().action_space, rng);
      CHECK(a.minCoeff() >= -1e-12);
      CHECK(a.sum() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("episode records and first-episode counts") {
  auto env = build_mean_revert_env();
  const TrainingResult one = run_training(env, mean_revert_run(1));
  CHECK(one.trace.steps.size() == 10);
  CHECK(one.trace.returns.size() == 1);
  for (const auto& tree : one.trees) {
    long counted = 0;
    for (int id : tree.roots()) counted += tree.block(id).count;
    CHECK(counted == 1);
  }
}

TEST_CASE("runs are deterministic under a fixed seed") {
  auto env = build_mean_revert_env();
  const TrainingResult a = run_training(env, mean_revert_run(60, 4));
  const TrainingResult b = run_training(env, mean_revert_run(60, 4));
  const TrainingResult c = run_training(env, mean_revert_run(60, 5));
  CHECK(trace_csv(a.trace) == trace_csv(b.trace));
  CHECK(trace_csv(a.trace) != trace_csv(c.trace));
  for (std::size_t h = 0; h < a.trees.size(); ++h) {
    CHECK(partition_json(a.trees[h], true) == partition_json(b.trees[h], true));
  }
}

TEST_CASE("split flags follow the confidence rule") {
  auto env = build_mean_revert_env();
  const TrainingResult run = run_training(env, mean_revert_run(100));
  long splits = 0;
  for (const auto& r : run.trace.steps) {
    if (r.block_id == kOutside) continue;
    CHECK(r.split == (r.conf <= r.diam));
    splits += r.split;
  }
  CHECK(splits > 0);
}

TEST_CASE("episode count validation and doubling") {
  auto env = build_mean_revert_env();
  RunConfig rc = mean_revert_run(0);
  CHECK_THROWS_AS(run_training(env, rc), ConfigError);
  rc.doubling.enabled = true;
  rc.doubling.k0 = 4;
  rc.doubling.rounds = 3;
  const TrainingResult run = run_training(env, rc);
  CHECK(run.trace.returns.size() == 4 + 8 + 16);
  CHECK(run.trace.steps.back().episode == 28);
}
