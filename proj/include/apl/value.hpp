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

#ifndef APL_VALUE_HPP_
#define APL_VALUE_HPP_

#include <vector>

#include "apl/bonus.hpp"
#include "apl/partition.hpp"

namespace apl {

enum class Anchor { kBlockCenter, kLastState };

// kStandard: Q0 = C~(1 + (|root center| + D)^{m+1}), V0(x) = C~(1 + |x|^{m+1}).
// kRhoBound: Q0 = V~0 = C~(1 + rho^{m+1}), V0(x) = Q0 + C~|x|^{m+1}; used
// for simplex action spaces whose root blocks span the whole action set.
enum class InitMode { kStandard, kRhoBound };

struct ValueConfig {
  // Scale of the initial optimistic values; per-h entries override it.
  double c_tilde = 1.0;
  std::vector<double> c_tilde_per_h;
  // Config-supplied local Lipschitz bound of the value estimates.
  double c_bar = 0.0;
  std::vector<double> c_bar_per_h;
  int mc_samples = 256;
  Anchor anchor = Anchor::kBlockCenter;
  InitMode init = InitMode::kStandard;
};

// Per-timestamp constants shared by the value estimators. Indices run over
// h = 1..H; entry 0 is unused.
struct ValueState {
  int horizon = 1;
  int m = 1;
  double rho = 1.0;
  double big_d = 1.0;
  InitMode init = InitMode::kStandard;
  std::vector<double> c_tilde;
  std::vector<double> c_bar;
  std::vector<double> c_h;
  // False until the first V-tilde update at h; before that the evaluator
  // returns the closed-form initial value.
  std::vector<bool> updated;

  double initial_q(const PartitionTree& tree, const Block& b) const;
  double initial_v_tilde(int h, const StateCell& cell) const;
  double initial_v_bar(int h, const Vec& x) const;
  double outside_q(int h) const;
};

ValueState make_value_state(const EnvSpec& spec, const ValueConfig& cfg,
                            double rho, double big_d);

// Writes the initial Q to every block, the outside sentinel, and V-tilde to
// every cell. trees[h - 1] is the partition at h.
ValueState init_values(std::vector<PartitionTree>& trees, const EnvSpec& spec,
                       const ValueConfig& cfg);

// Pointwise value estimate at one timestamp. Holds a snapshot index of the
// tree's cells; rebuild after cells or their values change.
class VBar {
 public:
  VBar(const PartitionTree& tree, const ValueState& vs);

  double operator()(const Vec& x) const;
  // Same value without candidate pruning.
  double brute(const Vec& x) const;
  double c_h() const { return c_h_; }

 private:
  double inside(const Vec& x, bool prune) const;
  double evaluate(const Vec& x, bool prune) const;

  int h_;
  int m_;
  double rho_;
  double c_h_;
  bool initial_;
  const ValueState* vs_;
  std::vector<Vec> centers_;
  std::vector<double> center_pow_;
  std::vector<double> v_;
  std::vector<double> key_;
  double v_min_ = 0.0;
};

// Monte Carlo mean of v over x_ref + mu dt + sqrt(sigma dt) z for the
// columns z of `normals`.
double expected_value_next(const VBar& v, const Vec& x_ref, const Vec& mu,
                           const Mat& sigma, double dt, const Mat& normals);

// Q update of a block: the initial value when count = 0, the terminal form at
// h = H, and the recursive form otherwise. y is the norm of the root
// ancestor's state center.
double update_q(const Block& b, double y, const Bonus& bonus, double exp_next,
                int h, int horizon, double q0);

// min(previous V-tilde, max Q over leaves covering the cell); stores and
// returns the new value.
double update_v_tilde(PartitionTree& tree, int cell);

}  // namespace apl

#endif  // APL_VALUE_HPP_
