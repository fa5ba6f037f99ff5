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

#include "apl/partition.hpp"

#include <algorithm>
#include <cmath>

namespace apl {
namespace {

bool box_contains(const Vec& outer_lo, const Vec& outer_hi, const Vec& lo,
                  const Vec& hi) {
  return (outer_lo.array() <= lo.array()).all() &&
         (hi.array() <= outer_hi.array()).all();
}

bool same_box(const Vec& lo1, const Vec& hi1, const Vec& lo2, const Vec& hi2) {
  return lo1 == lo2 && hi1 == hi2;
}

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

// All 2^d sub-boxes of [lo, hi] in binary-counter order.
std::vector<std::pair<Vec, Vec>> bisect_box(const Vec& lo, const Vec& hi) {
  const auto d = lo.size();
  const Vec mid = 0.5 * (lo + hi);
  std::vector<std::pair<Vec, Vec>> out;
  for (long mask = 0; mask < (1L << d); ++mask) {
    Vec clo = lo, chi = mid;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (mask & (1L << (d - 1 - i))) {
        clo[i] = mid[i];
        chi[i] = hi[i];
      }
    }
    out.emplace_back(std::move(clo), std::move(chi));
  }
  return out;
}

// Distance from the origin to the box [lo, hi].
double origin_distance(const Vec& lo, const Vec& hi) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    const double g = std::max({0.0, lo[i], -hi[i]});
    s += g * g;
  }
  return std::sqrt(s);
}

// State slabs of the origin-aligned grid with side `side` whose interior meets
// the open ball of radius rho.
std::vector<std::pair<Vec, Vec>> state_slabs(int d_s, double side, double rho) {
  const long lo_idx = static_cast<long>(std::floor(-rho / side)) - 1;
  const long hi_idx = static_cast<long>(std::ceil(rho / side));
  const long width = hi_idx - lo_idx + 1;
  long total = 1;
  for (int i = 0; i < d_s; ++i) total *= width;
  std::vector<std::pair<Vec, Vec>> out;
  for (long flat = 0; flat < total; ++flat) {
    Vec lo(d_s), hi(d_s);
    long rem = flat;
    for (int i = d_s - 1; i >= 0; --i) {
      const long idx = lo_idx + rem % width;
      rem /= width;
      lo[i] = double(idx) * side;
      hi[i] = double(idx + 1) * side;
    }
    if (origin_distance(lo, hi) < rho) out.emplace_back(lo, hi);
  }
  return out;
}

}  // namespace

Vec action_cell_center(const ActionCell& cell) {
  if (const auto* box = std::get_if<BoxCell>(&cell)) {
    return 0.5 * (box->lo + box->hi);
  }
  const auto& s = std::get<SimplexCell>(cell);
  return s.vertices.colwise().mean().transpose();
}

double action_cell_diam(const ActionCell& cell) {
  if (const auto* box = std::get_if<BoxCell>(&cell)) {
    return (box->hi - box->lo).norm();
  }
  const Mat& v = std::get<SimplexCell>(cell).vertices;
  double best = 0.0;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < v.rows(); ++j) {
      best = std::max(best, (v.row(i) - v.row(j)).norm());
    }
  }
  return best;
}

double action_cell_volume(const ActionCell& cell) {
  if (const auto* box = std::get_if<BoxCell>(&cell)) {
    return (box->hi - box->lo).prod();
  }
  const Mat& v = std::get<SimplexCell>(cell).vertices;
  const auto d = v.cols();
  Mat edges(d, d);
  for (Eigen::Index i = 0; i < d; ++i) edges.row(i) = v.row(i + 1) - v.row(0);
  return std::abs(edges.determinant()) / factorial(static_cast<int>(d));
}

Vec action_cell_lo(const ActionCell& cell) {
  if (const auto* box = std::get_if<BoxCell>(&cell)) return box->lo;
  return std::get<SimplexCell>(cell).vertices.colwise().minCoeff().transpose();
}

Vec action_cell_hi(const ActionCell& cell) {
  if (const auto* box = std::get_if<BoxCell>(&cell)) return box->hi;
  return std::get<SimplexCell>(cell).vertices.colwise().maxCoeff().transpose();
}

std::vector<SimplexCell> split_simplex(const SimplexCell& cell) {
  const Mat& p = cell.vertices;
  const int d = static_cast<int>(p.cols());
  // Affine map from reference coordinates: A(y) = p_0 + E y.
  Mat e(d, d);
  for (int i = 0; i < d; ++i) e.col(i) = (p.row(i + 1) - p.row(i)).transpose();
  auto to_action = [&](const Vec& y) -> Vec {
    return p.row(0).transpose() + e * y;
  };

  std::vector<SimplexCell> out;
  // The doubled reference simplex is tiled by unit Kuhn simplices lying in the
  // cubes with corner (1,..,1,0,..,0) (j ones). Within such a cube the
  // fractional parts of the two coordinate groups stay sorted, so each child
  // corresponds to one interleaving of the groups.
  for (int j = 0; j <= d; ++j) {
    for (long mask = 0; mask < (1L << d); ++mask) {
      if (__builtin_popcountl(static_cast<unsigned long>(mask)) != j) continue;
      // Positions set in mask take the next index of group one (0..j-1).
      std::vector<int> order;
      int next1 = 0, next2 = j;
      for (int pos = 0; pos < d; ++pos) {
        if (mask & (1L << (d - 1 - pos))) {
          order.push_back(next1++);
        } else {
          order.push_back(next2++);
        }
      }
      Vec y = Vec::Zero(d);
      for (int i = 0; i < j; ++i) y[i] = 1.0;
      Mat verts(d + 1, d);
      verts.row(0) = to_action(0.5 * y).transpose();
      for (int k = 0; k < d; ++k) {
        y[order[k]] += 1.0;
        verts.row(k + 1) = to_action(0.5 * y).transpose();
      }
      out.push_back(SimplexCell{std::move(verts)});
    }
  }
  return out;
}

double Block::diam() const {
  const double s = (state_hi - state_lo).norm();
  const double a = action_cell_diam(action);
  return std::sqrt(s * s + a * a);
}

double Block::volume() const {
  return (state_hi - state_lo).prod() * action_cell_volume(action);
}

bool Block::state_contains(const Vec& x) const {
  return (state_lo.array() <= x.array()).all() &&
         (x.array() <= state_hi.array()).all();
}

Vec Block::lo() const {
  Vec a = action_cell_lo(action);
  Vec out(state_lo.size() + a.size());
  out << state_lo, a;
  return out;
}

Vec Block::hi() const {
  Vec a = action_cell_hi(action);
  Vec out(state_hi.size() + a.size());
  out << state_hi, a;
  return out;
}

PartitionTree::PartitionTree(const EnvSpec& spec, int h,
                             const PartitionConfig& cfg)
    : h_(h), d_s_(spec.d_s), rho_(cfg.rho) {
  if (!(cfg.rho > 0.0)) throw ConfigError("rho must be positive");

  std::vector<ActionCell> action_tiles;
  double state_side = 0.0;
  if (const auto* cube = std::get_if<Hypercube>(&spec.action_space)) {
    require_valid(spec, cfg.big_d);
    state_side = cfg.big_d / std::sqrt(double(spec.d_s + spec.d_a));
    const long per_side =
        std::lround(2.0 * cube->half_width / state_side);
    long total = 1;
    for (int i = 0; i < spec.d_a; ++i) total *= per_side;
    const Vec base = cube->center.array() - cube->half_width;
    for (long flat = 0; flat < total; ++flat) {
      Vec lo(spec.d_a), hi(spec.d_a);
      long rem = flat;
      for (int i = spec.d_a - 1; i >= 0; --i) {
        const long idx = rem % per_side;
        rem /= per_side;
        lo[i] = base[i] + double(idx) * state_side;
        hi[i] = base[i] + double(idx + 1) * state_side;
      }
      action_tiles.push_back(BoxCell{lo, hi});
    }
    big_d_ = cfg.big_d;
  } else {
    const int d = std::get<Simplex>(spec.action_space).dim;
    Mat verts = Mat::Zero(d + 1, d);
    for (int i = 0; i < d; ++i) verts(i + 1, i) = 1.0;
    action_tiles.push_back(SimplexCell{verts});
    state_side = cfg.simplex_state_side > 0.0 ? cfg.simplex_state_side : cfg.rho;
  }

  for (auto& [lo, hi] : state_slabs(spec.d_s, state_side, cfg.rho)) {
    for (const auto& tile : action_tiles) {
      Block b;
      b.id = static_cast<int>(blocks_.size());
      b.h = h;
      b.state_lo = lo;
      b.state_hi = hi;
      b.action = tile;
      b.root = b.id;
      b.stats = BlockStats(spec.d_s);
      blocks_.push_back(std::move(b));
      roots_.push_back(blocks_.back().id);
    }
  }
  if (std::holds_alternative<Simplex>(spec.action_space)) {
    big_d_ = blocks_.front().diam();
  }
  rebuild_cells();
}

PartitionTree PartitionTree::from_blocks(const EnvSpec& spec, int h, double rho,
                                         double big_d, std::vector<Block> blocks,
                                         std::vector<StateCell> cells,
                                         double outside_q) {
  PartitionTree tree;
  tree.h_ = h;
  tree.d_s_ = spec.d_s;
  tree.rho_ = rho;
  tree.big_d_ = big_d;
  tree.blocks_ = std::move(blocks);
  std::sort(tree.blocks_.begin(), tree.blocks_.end(),
            [](const Block& a, const Block& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < tree.blocks_.size(); ++i) {
    if (tree.blocks_[i].id != static_cast<int>(i)) {
      throw DataError("block ids must be contiguous from 0");
    }
    tree.blocks_[i].children.clear();
  }
  for (auto& b : tree.blocks_) {
    if (b.parent < 0) {
      tree.roots_.push_back(b.id);
      b.root = b.id;
    } else {
      tree.blocks_.at(b.parent).children.push_back(b.id);
    }
  }
  for (auto& b : tree.blocks_) {
    if (b.parent >= 0) b.root = tree.blocks_[b.parent].root;
  }
  tree.outside_q_ = outside_q;
  tree.rebuild_cells();
  for (const auto& c : cells) {
    for (auto& mine : tree.cells_) {
      if (same_box(mine.lo, mine.hi, c.lo, c.hi)) mine.v_tilde = c.v_tilde;
    }
  }
  return tree;
}

bool PartitionTree::inside_roots(const Vec& x) const {
  for (int r : roots_) {
    if (blocks_[r].state_contains(x)) return true;
  }
  return false;
}

void PartitionTree::collect_leaves(int id, const Vec& x,
                                   std::vector<int>& out) const {
  const Block& b = blocks_[id];
  if (!b.state_contains(x)) return;
  if (b.is_leaf()) {
    out.push_back(id);
    return;
  }
  for (int c : b.children) collect_leaves(c, x, out);
}

std::vector<int> PartitionTree::relevant(const Vec& x) const {
  std::vector<int> out;
  for (int r : roots_) collect_leaves(r, x, out);
  if (out.empty()) out.push_back(kOutside);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> PartitionTree::split(int id) {
  if (id == kOutside) throw LogicError("the outside region is never split");
  if (!blocks_.at(id).is_leaf()) throw LogicError("split of a non-leaf block");

  const Block parent = blocks_[id];
  std::vector<ActionCell> action_children;
  if (const auto* box = std::get_if<BoxCell>(&parent.action)) {
    for (auto& [lo, hi] : bisect_box(box->lo, box->hi)) {
      action_children.push_back(BoxCell{lo, hi});
    }
  } else {
    for (auto& s : split_simplex(std::get<SimplexCell>(parent.action))) {
      action_children.push_back(std::move(s));
    }
  }

  std::vector<int> ids;
  for (auto& [slo, shi] : bisect_box(parent.state_lo, parent.state_hi)) {
    for (const auto& a : action_children) {
      Block c;
      c.id = static_cast<int>(blocks_.size());
      c.h = parent.h;
      c.state_lo = slo;
      c.state_hi = shi;
      c.action = a;
      c.depth = parent.depth + 1;
      c.parent = parent.id;
      c.root = parent.root;
      c.count = parent.count;
      c.stats = parent.stats;
      c.q_bar = parent.q_bar;
      ids.push_back(c.id);
      blocks_.push_back(std::move(c));
    }
  }
  blocks_[id].children = ids;
  rebuild_cells();
  return ids;
}

void PartitionTree::update_counts(int id) {
  if (id == kOutside) {
    ++outside_count_;
    return;
  }
  ++blocks_.at(id).count;
}

std::vector<int> PartitionTree::leaves() const {
  std::vector<int> out;
  for (const auto& b : blocks_) {
    if (b.is_leaf()) out.push_back(b.id);
  }
  return out;
}

void PartitionTree::rebuild_cells() {
  std::vector<std::pair<Vec, Vec>> projections;
  for (const auto& b : blocks_) {
    if (!b.is_leaf()) continue;
    bool seen = false;
    for (const auto& [lo, hi] : projections) {
      if (same_box(lo, hi, b.state_lo, b.state_hi)) {
        seen = true;
        break;
      }
    }
    if (!seen) projections.emplace_back(b.state_lo, b.state_hi);
  }

  std::vector<StateCell> fresh;
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const auto& [lo, hi] = projections[i];
    bool minimal = true;
    for (std::size_t j = 0; j < projections.size() && minimal; ++j) {
      if (i == j) continue;
      if (box_contains(lo, hi, projections[j].first, projections[j].second)) {
        minimal = false;
      }
    }
    if (!minimal) continue;
    StateCell cell{lo, hi, 0.0};
    for (const auto& old : cells_) {
      if (box_contains(old.lo, old.hi, lo, hi)) {
        cell.v_tilde = old.v_tilde;
        break;
      }
    }
    fresh.push_back(std::move(cell));
  }
  std::sort(fresh.begin(), fresh.end(), [](const StateCell& a, const StateCell& b) {
    return lex_less(a.lo, b.lo);
  });
  cells_ = std::move(fresh);
}

std::vector<int> PartitionTree::covering_leaves(const Vec& lo,
                                                const Vec& hi) const {
  std::vector<int> out;
  std::vector<int> stack(roots_.rbegin(), roots_.rend());
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const Block& b = blocks_[id];
    if (!box_contains(b.state_lo, b.state_hi, lo, hi)) continue;
    if (b.is_leaf()) {
      out.push_back(id);
    } else {
      for (auto it = b.children.rbegin(); it != b.children.rend(); ++it) {
        stack.push_back(*it);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> PartitionTree::cells_within(const Vec& lo, const Vec& hi) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (box_contains(lo, hi, cells_[i].lo, cells_[i].hi)) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

double PartitionTree::root_volume() const {
  double v = 0.0;
  for (int r : roots_) v += blocks_[r].volume();
  return v;
}

double PartitionTree::leaf_volume() const {
  double v = 0.0;
  for (const auto& b : blocks_) {
    if (b.is_leaf()) v += b.volume();
  }
  return v;
}

std::vector<StateCell> induced_state_cells(const PartitionTree& tree) {
  return tree.cells();
}

}  // namespace apl
