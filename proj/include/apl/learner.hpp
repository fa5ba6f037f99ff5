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


#ifndef APL_LEARNER_HPP_
#define APL_LEARNER_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "apl/bonus.hpp"
#include "apl/env.hpp"
#include "apl/partition.hpp"
#include "apl/value.hpp"

namespace apl {

struct DoublingConfig {
  bool enabled = false;
  long k0 = 1;
  int rounds = 1;
};

struct RunConfig {
  long episodes = 1;
  std::uint64_t seed = 1;
  PartitionConfig partition;
  BonusConfig bonus;
  ValueConfig value;
  DoublingConfig doubling;
};

struct StepRecord {
  long episode = 0;
  int h = 1;
  int block_id = kOutside;
  int depth = -1;
  Vec state;
  Vec action;
  double reward = 0.0;
  Vec next_state;
  // NaN for the outside sentinel.
  double conf = 0.0;
  double diam = 0.0;
  bool split = false;
  long count = 0;  // after the increment
  double q_before = 0.0;
  double q_after = 0.0;
};

struct EpisodeTrace {
  int horizon = 1;
  int d_s = 1;
  int d_a = 1;
  std::vector<StepRecord> steps;
  std::vector<double> returns;
  std::vector<Vec> initial_states;
};

// Argmax of Q over the relevant leaves at x; ties go to the deeper block,
// then the smaller id.
int select_block(const PartitionTree& tree, const Vec& x);

// Uniform draw from the block's action cell, or from all of A for kOutside.
Vec sample_action(const PartitionTree& tree, int id, const ActionSpace& space,
                  Rng& rng);

class Learner {
 public:
  // round salts the random streams so doubling rounds are independent.
  Learner(std::shared_ptr<const Environment> env, const RunConfig& cfg,
          long episodes, std::uint64_t round = 0);

  // Plays one episode with local index k (1-based) and appends H records.
  void run_episode(long k, EpisodeTrace& trace, long episode_label);

  const Environment& env() const { return *env_; }
  const std::vector<PartitionTree>& trees() const { return trees_; }
  const PartitionTree& tree(int h) const { return trees_.at(h - 1); }
  const ValueState& values() const { return values_; }
  const Bonus& bonus() const { return bonus_; }

  // One step of the current greedy policy; no learning.
  Vec act(int h, const Vec& x, Rng& action_rng, int* block = nullptr) const;

  // Mean return of the frozen current policy over `rollouts` episodes.
  double evaluate_policy(int rollouts, Rng& rng) const;

 private:
  void backward_step(long k, StepRecord& rec);

  std::shared_ptr<const Environment> env_;
  RunConfig cfg_;
  std::uint64_t round_;
  std::vector<PartitionTree> trees_;
  Bonus bonus_;
  ValueState values_;
  Rng noise_rng_;
  Rng action_rng_;
  Rng reward_rng_;
  Rng initial_rng_;
};

struct TrainingResult {
  EpisodeTrace trace;
  std::vector<PartitionTree> trees;
  ValueState values;
};

// Called after every episode with its global label.
using EpisodeHook = std::function<void(long, const Learner&)>;

// K episodes, or doubling rounds of 2^i k0 episodes with a fresh learner per
// round; the returned partitions are those of the last round.
TrainingResult run_training(std::shared_ptr<const Environment> env,
                            const RunConfig& cfg,
                            const EpisodeHook& hook = nullptr);
// Same, filling `out` as it goes so a failed run leaves its partial trace.
void run_training(std::shared_ptr<const Environment> env, const RunConfig& cfg,
                  TrainingResult& out, const EpisodeHook& hook = nullptr);

}  // namespace apl

#endif  // APL_LEARNER_HPP_
