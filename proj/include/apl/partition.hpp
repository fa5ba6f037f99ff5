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

#ifndef APL_PARTITION_HPP_
#define APL_PARTITION_HPP_

#include <variant>
#include <vector>

#include "apl/common.hpp"
#include "apl/env.hpp"
#include "apl/estimate.hpp"

namespace apl {

// Id of the pseudo-block covering everything outside the root layer.
inline constexpr int kOutside = -1;

struct BoxCell {
  Vec lo;
  Vec hi;
};

// A simplex stored by its vertices (rows) in Kuhn path order, so that it is
// the affine image y -> v_0 + sum_i y_i (v_i - v_{i-1}) of the reference
// simplex {1 >= y_1 >= ... >= y_d >= 0}.
struct SimplexCell {
  Mat vertices;
};

using ActionCell = std::variant<BoxCell, SimplexCell>;

Vec action_cell_center(const ActionCell& cell);
double action_cell_diam(const ActionCell& cell);
double action_cell_volume(const ActionCell& cell);
Vec action_cell_lo(const ActionCell& cell);
Vec action_cell_hi(const ActionCell& cell);

// Freudenthal subdivision of a simplex into 2^d simplices of equal volume.
std::vector<SimplexCell> split_simplex(const SimplexCell& cell);

struct Block {
  int id = 0;
  int h = 1;
  Vec state_lo;
  Vec state_hi;
  ActionCell action;
  int depth = 0;
  int parent = -1;
  int root = 0;  // the root-layer ancestor
  std::vector<int> children;
  long count = 0;
  BlockStats stats;
  double q_bar = 0.0;

  bool is_leaf() const { return children.empty(); }
  Vec state_center() const { return 0.5 * (state_lo + state_hi); }
  Vec action_center() const { return action_cell_center(action); }
  double diam() const;
  double volume() const;
  bool state_contains(const Vec& x) const;
  // Bounding box over state then action coordinates.
  Vec lo() const;
  Vec hi() const;
};

struct StateCell {
  Vec lo;
  Vec hi;
  double v_tilde = 0.0;

  Vec center() const { return 0.5 * (lo + hi); }
};

struct PartitionConfig {
  double rho = 1.0;
  // Root block diameter for cube action spaces.
  double big_d = 1.0;
  // State side of root blocks for simplex action spaces; rho when <= 0.
  double simplex_state_side = 0.0;
};

// Adaptive partition of state-action space for one timestamp.
class PartitionTree {
 public:
  PartitionTree(const EnvSpec& spec, int h, const PartitionConfig& cfg);

  int h() const { return h_; }
  double rho() const { return rho_; }
  double big_d() const { return big_d_; }
  int d_s() const { return d_s_; }

  const std::vector<int>& roots() const { return roots_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(int id) const { return blocks_.at(id); }
  Block& block(int id) { return blocks_.at(id); }
  std::size_t size() const { return blocks_.size(); }

  double outside_q() const { return outside_q_; }
  void set_outside_q(double q) { outside_q_ = q; }
  long outside_count() const { return outside_count_; }

  // Leaves whose state projection contains x (closed), plus kOutside iff x is
  // outside the union of root state projections. Never empty.
  std::vector<int> relevant(const Vec& x) const;
  bool inside_roots(const Vec& x) const;

  // Bisects every dimension; children inherit count and statistics.
  std::vector<int> split(int id);

  void update_counts(int id);

  std::vector<int> leaves() const;

  // Minimal state projections of the leaves; they partition the root state
  // region. Cells created by a split inherit v_tilde from the cell they refine.
  const std::vector<StateCell>& cells() const { return cells_; }
  std::vector<StateCell>& cells() { return cells_; }

  // Leaves whose state projection contains the box [lo, hi].
  std::vector<int> covering_leaves(const Vec& lo, const Vec& hi) const;
  // Indices of cells contained in the box [lo, hi].
  std::vector<int> cells_within(const Vec& lo, const Vec& hi) const;

  double root_volume() const;
  double leaf_volume() const;

  // Rebuilds from exported geometry: used by partition import.
  static PartitionTree from_blocks(const EnvSpec& spec, int h, double rho,
                                   double big_d, std::vector<Block> blocks,
                                   std::vector<StateCell> cells,
                                   double outside_q);

 private:
  PartitionTree() = default;
  void rebuild_cells();
  void collect_leaves(int id, const Vec& x, std::vector<int>& out) const;

  int h_ = 1;
  int d_s_ = 1;
  double rho_ = 1.0;
  double big_d_ = 1.0;
  std::vector<Block> blocks_;
  std::vector<int> roots_;
  std::vector<StateCell> cells_;
  double outside_q_ = 0.0;
  long outside_count_ = 0;
};

// The state partition induced by the current leaves.
std::vector<StateCell> induced_state_cells(const PartitionTree& tree);

}  // namespace apl

#endif  // APL_PARTITION_HPP_
