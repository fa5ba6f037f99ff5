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


#include "apl/learner.hpp"

#include <cmath>
#include <limits>

#include "apl/estimate.hpp"

namespace apl {

namespace {

std::vector<PartitionTree> build_trees(const EnvSpec& spec,
                                       const PartitionConfig& cfg) {
  std::vector<PartitionTree> trees;
  trees.reserve(spec.horizon);
  for (int h = 1; h <= spec.horizon; ++h) trees.emplace_back(spec, h, cfg);
  return trees;
}

BonusConfig with_k(BonusConfig cfg, long episodes) {
  cfg.k_total = episodes;
  return cfg;
}

Vec dirichlet_mix(const Mat& vertices, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vec w(vertices.rows());
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = expo(rng);
  w /= w.sum();
  return vertices.transpose() * w;
}

Vec uniform_box(const Vec& lo, const Vec& hi, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec out(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    out[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
  }
  return out;
}

double root_norm(const PartitionTree& tree, const Block& b) {
  return tree.block(b.root).state_center().norm();
}

}  // namespace

int select_block(const PartitionTree& tree, const Vec& x) {
  int best = kOutside;
  double best_q = -std::numeric_limits<double>::infinity();
  int best_depth = -2;
  for (int id : tree.relevant(x)) {
    const double q = id == kOutside ? tree.outside_q() : tree.block(id).q_bar;
    const int depth = id == kOutside ? -1 : tree.block(id).depth;
    const bool better =
        q > best_q ||
        (q == best_q && (depth > best_depth ||
                         (depth == best_depth && id < best)));
    if (better) {
      best = id;
      best_q = q;
      best_depth = depth;
    }
  }
  return best;
}

Vec sample_action(const PartitionTree& tree, int id, const ActionSpace& space,
                  Rng& rng) {
  if (id != kOutside) {
    const ActionCell& cell = tree.block(id).action;
    if (const auto* box = std::get_if<BoxCell>(&cell)) {
      return uniform_box(box->lo, box->hi, rng);
    }
    return dirichlet_mix(std::get<SimplexCell>(cell).vertices, rng);
  }
  if (const auto* cube = std::get_if<Hypercube>(&space)) {
    const Vec hw = Vec::Constant(cube->center.size(), cube->half_width);
    return uniform_box(cube->center - hw, cube->center + hw, rng);
  }
  const int d = std::get<Simplex>(space).dim;
  Mat corners = Mat::Zero(d + 1, d);
  corners.bottomRows(d) = Mat::Identity(d, d);
  return dirichlet_mix(corners, rng);
}

Learner::Learner(std::shared_ptr<const Environment> env, const RunConfig& cfg,
                 long episodes, std::uint64_t round)
    : env_(std::move(env)),
      cfg_(cfg),
      round_(round),
      trees_(build_trees(env_->spec(), cfg.partition)),
      bonus_(env_->spec(), with_k(cfg.bonus, episodes), trees_.front().big_d()),
      values_(init_values(trees_, env_->spec(), cfg.value)),
      noise_rng_(make_stream(cfg.seed, Stream::kEnvNoise, round)),
      action_rng_(make_stream(cfg.seed, Stream::kAction, round)),
      reward_rng_(make_stream(cfg.seed, Stream::kReward, round)),
      initial_rng_(make_stream(cfg.seed, Stream::kInitial, round)) {
  if (episodes < 1) throw ConfigError("learner.episodes must be >= 1");
}

Vec Learner::act(int h, const Vec& x, Rng& action_rng, int* block) const {
  const PartitionTree& t = tree(h);
  const int id = select_block(t, x);
  if (block != nullptr) *block = id;
  return sample_action(t, id, env_->spec().action_space, action_rng);
}

double Learner::evaluate_policy(int rollouts, Rng& rng) const {
  const int horizon = env_->spec().horizon;
  double total = 0.0;
  for (int i = 0; i < rollouts; ++i) {
    Vec x = env_->sample_initial(rng);
    for (int h = 1; h <= horizon; ++h) {
      const Vec a = act(h, x, rng);
      StepResult s = step(*env_, h, x, a, rng);
      total += s.reward;
      x = std::move(s.next_state);
    }
  }
  return total / double(rollouts);
}

void Learner::run_episode(long k, EpisodeTrace& trace, long episode_label) {
  const EnvSpec& spec = env_->spec();
  const std::size_t first = trace.steps.size();
  Vec x = env_->sample_initial(initial_rng_);
  trace.initial_states.push_back(x);
  double ret = 0.0;
  for (int h = 1; h <= spec.horizon; ++h) {
    StepRecord rec;
    rec.episode = episode_label;
    rec.h = h;
    rec.state = x;
    rec.action = act(h, x, action_rng_, &rec.block_id);
    StepResult s = step(*env_, h, x, rec.action, noise_rng_, reward_rng_);
    rec.reward = s.reward;
    rec.next_state = s.next_state;
    ret += s.reward;
    x = std::move(s.next_state);
    trace.steps.push_back(std::move(rec));
  }
  for (int h = spec.horizon; h >= 1; --h) {
    backward_step(k, trace.steps[first + h - 1]);
  }
  trace.returns.push_back(ret);
}

void Learner::backward_step(long k, StepRecord& rec) {
  const EnvSpec& spec = env_->spec();
  const int h = rec.h;
  PartitionTree& t = trees_[h - 1];
  t.update_counts(rec.block_id);
  if (rec.block_id == kOutside) {
    rec.conf = std::numeric_limits<double>::quiet_NaN();
    rec.diam = std::numeric_limits<double>::quiet_NaN();
    rec.count = t.outside_count();
    rec.q_before = rec.q_after = t.outside_q();
    return;
  }
  const int id = rec.block_id;
  record_visit(t.block(id).stats, rec.next_state - rec.state, rec.reward);
  const Block& b = t.block(id);
  const double y = root_norm(t, b);
  rec.depth = b.depth;
  rec.count = b.count;
  rec.q_before = b.q_bar;
  rec.conf = bonus_.conf(y, b.count);
  rec.diam = b.diam();
  const Vec lo = b.state_lo;
  const Vec hi = b.state_hi;

  std::vector<int> targets{id};
  if (rec.conf <= rec.diam) {
    rec.split = true;
    for (int child : t.split(id)) targets.push_back(child);
  }

  const Vec mu = drift_estimate(t.block(id).stats, spec.dt);
  const Mat sigma = cov_estimate(t.block(id).stats, spec.dt);
  std::unique_ptr<VBar> v_next;
  Mat normals;
  if (h < spec.horizon) {
    v_next = std::make_unique<VBar>(trees_[h], values_);
    Rng mc = make_stream(cfg_.seed, Stream::kValueMc,
                         (round_ << 40) ^ (std::uint64_t(k) * 1024 + h));
    normals.resize(spec.d_s, cfg_.value.mc_samples);
    for (int j = 0; j < cfg_.value.mc_samples; ++j) {
      normals.col(j) = standard_normal(mc, spec.d_s);
    }
  }
  for (int target : targets) {
    Block& tb = t.block(target);
    double exp_next = 0.0;
    if (v_next) {
      const Vec anchor = cfg_.value.anchor == Anchor::kBlockCenter
                             ? tb.state_center()
                             : rec.state;
      exp_next = expected_value_next(*v_next, anchor, mu, sigma, spec.dt,
                                     normals);
    }
    tb.q_bar = update_q(tb, y, bonus_, exp_next, h, spec.horizon,
                        values_.initial_q(t, tb));
  }
  rec.q_after = t.block(id).q_bar;

  for (int cell : t.cells_within(lo, hi)) update_v_tilde(t, cell);
  values_.updated[h] = true;
}

TrainingResult run_training(std::shared_ptr<const Environment> env,
                            const RunConfig& cfg, const EpisodeHook& hook) {
  TrainingResult out;
  run_training(std::move(env), cfg, out, hook);
  return out;
}

void run_training(std::shared_ptr<const Environment> env, const RunConfig& cfg,
                  TrainingResult& out, const EpisodeHook& hook) {
  out = TrainingResult{};
  const EnvSpec& spec = env->spec();
  out.trace.horizon = spec.horizon;
  out.trace.d_s = spec.d_s;
  out.trace.d_a = spec.d_a;
  if (!cfg.doubling.enabled) {
    if (cfg.episodes < 1) throw ConfigError("learner.episodes must be >= 1");
    Learner learner(env, cfg, cfg.episodes);
    for (long k = 1; k <= cfg.episodes; ++k) {
      learner.run_episode(k, out.trace, k);
      if (hook) hook(k, learner);
    }
    out.trees = learner.trees();
    out.values = learner.values();
    return;
  }
  if (cfg.doubling.k0 < 1 || cfg.doubling.rounds < 1) {
    throw ConfigError("doubling needs k0 >= 1 and rounds >= 1");
  }
  long label = 0;
  for (int i = 0; i < cfg.doubling.rounds; ++i) {
    const long k_i = cfg.doubling.k0 << i;
    Learner learner(env, cfg, k_i, std::uint64_t(i));
    for (long k = 1; k <= k_i; ++k) {
      learner.run_episode(k, out.trace, ++label);
      if (hook) hook(label, learner);
    }
    if (i + 1 == cfg.doubling.rounds) {
      out.trees = learner.trees();
      out.values = learner.values();
    }
  }
}

}  // namespace apl
