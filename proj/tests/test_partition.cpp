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

#include <algorithm>
#include <cmath>

#include "apl/partition.hpp"

using namespace apl;

namespace {

PartitionConfig mean_revert_partition() {
  PartitionConfig cfg;
  cfg.rho = 10.0;
  cfg.big_d = 10.0 * std::sqrt(2.0);
  return cfg;
}

bool has_cell(const std::vector<StateCell>& cells, double lo, double hi) {
  return std::any_of(cells.begin(), cells.end(), [&](const StateCell& c) {
    return std::abs(c.lo[0] - lo) < 1e-12 && std::abs(c.hi[0] - hi) < 1e-12;
  });
}

}  // namespace

TEST_CASE("root layer of the mean revert config") {
  auto env = build_mean_revert_env();
  PartitionTree tree(env->spec(), 1, mean_revert_partition());
  REQUIRE(tree.roots().size() == 2);
  std::vector<std::pair<double, double>> boxes;
  for (int id : tree.roots()) {
    const Block& b = tree.block(id);
    CHECK(b.action_center()[0] == 5.0);
    CHECK(b.diam() == doctest::Approx(10.0 * std::sqrt(2.0)));
    CHECK(action_cell_lo(b.action)[0] == 0.0);
    CHECK(action_cell_hi(b.action)[0] == 10.0);
    CHECK(b.count == 0);
    boxes.emplace_back(b.state_lo[0], b.state_hi[0]);
  }
  std::sort(boxes.begin(), boxes.end());
  CHECK(boxes[0] == std::make_pair(-10.0, 0.0));
  CHECK(boxes[1] == std::make_pair(0.0, 10.0));
  CHECK(tree.cells().size() == 2);
  CHECK(has_cell(tree.cells(), -10.0, 0.0));
  CHECK(has_cell(tree.cells(), 0.0, 10.0));
}

TEST_CASE("splitting refines the induced state cells locally") {
  auto env = build_mean_revert_env();
  PartitionTree tree(env->spec(), 1, mean_revert_partition());
  const int right = tree.relevant(Vec::Constant(1, 4.0)).front();
  const auto kids = tree.split(right);
  CHECK(kids.size() == 4);
  for (int k : kids) {
    CHECK(tree.block(k).depth == 1);
    CHECK(tree.block(k).parent == right);
    CHECK(tree.block(k).diam() == doctest::Approx(5.0 * std::sqrt(2.0)));
  }
  CHECK(tree.cells().size() == 3);
  CHECK(has_cell(tree.cells(), 0.0, 5.0));
  CHECK(has_cell(tree.cells(), 5.0, 10.0));
  CHECK(has_cell(tree.cells(), -10.0, 0.0));
  CHECK(tree.cells().size() == induced_state_cells(tree).size());
  CHECK_FALSE(tree.block(right).is_leaf());
}

TEST_CASE("children inherit counts and statistics") {
  auto env = build_mean_revert_env();
  PartitionTree tree(env->spec(), 1, mean_revert_partition());
  const int id = tree.relevant(Vec::Constant(1, 4.0)).front();
  tree.update_counts(id);
  tree.update_counts(id);
  record_visit(tree.block(id).stats, Vec::Constant(1, 0.5), 3.0);
  for (int k : tree.split(id)) {
    CHECK(tree.block(k).count == 2);
    CHECK(tree.block(k).stats.sum_r == 3.0);
  }
}

TEST_CASE("relevant blocks and the outside sentinel") {
  auto env = build_mean_revert_env();
  PartitionTree tree(env->spec(), 1, mean_revert_partition());
  CHECK(tree.relevant(Vec::Constant(1, 12.0)) == std::vector<int>{kOutside});
  CHECK(tree.relevant(Vec::Constant(1, 0.0)).size() == 2);
  Rng rng(3);
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  for (int i = 0; i < 200; ++i) {
    const auto leaves = tree.leaves();
    tree.split(leaves[std::size_t(i) % leaves.size()]);
    CHECK_FALSE(tree.relevant(Vec::Constant(1, u(rng))).empty());
  }
}

TEST_CASE("leaf volume is conserved under random splits") {
  for (auto env : {build_mean_revert_env(), build_portfolio_env()}) {
    PartitionConfig cfg = mean_revert_partition();
    PartitionTree tree(env->spec(), 1, cfg);
    Rng rng(17);
    const double roots = tree.root_volume();
    for (int i = 0; i < 40; ++i) {
      const auto leaves = tree.leaves();
      std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
      tree.split(leaves[pick(rng)]);
      CHECK(std::abs(tree.leaf_volume() - roots) <= 1e-9 * roots);
    }
  }
}

TEST_CASE("simplex split gives 2^d equal sub-simplices") {
  const int d = 5;
  SimplexCell s{Mat::Zero(d + 1, d)};
  for (int i = 1; i <= d; ++i) {
    s.vertices.row(i) = s.vertices.row(i - 1);
    s.vertices(i, i - 1) = 1.0;
  }
  const auto kids = split_simplex(s);
  CHECK(kids.size() == 32);
  double total = 0.0;
  for (const auto& k : kids) {
    CHECK(action_cell_volume(k) == doctest::Approx(action_cell_volume(s) / 32.0));
    CHECK(action_cell_diam(k) == doctest::Approx(action_cell_diam(s) / 2.0));
    total += action_cell_volume(k);
  }
  CHECK(total == doctest::Approx(action_cell_volume(s)));
  CHECK(action_cell_volume(s) == doctest::Approx(1.0 / 120.0));
}

TEST_CASE("bad partition parameters") {
  auto env = build_mean_revert_env();
  PartitionConfig cfg = mean_revert_partition();
  cfg.rho = 0.0;
  CHECK_THROWS_AS(PartitionTree(env->spec(), 1, cfg), ConfigError);
  cfg = mean_revert_partition();
  cfg.big_d = 4.0 * std::sqrt(2.0);
  CHECK_THROWS_AS(PartitionTree(env->spec(), 1, cfg), ConfigError);
}
