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


#include "apl/value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apl/estimate.hpp"

namespace apl {

namespace {

double per_h(const std::vector<double>& table, double fallback, int h) {
  if (table.empty()) return fallback;
  if (int(table.size()) < h) {
    throw ConfigError("per-timestamp value constants shorter than horizon");
  }
  return table[h - 1];
}

}  // namespace

double ValueState::initial_q(const PartitionTree& tree, const Block& b) const {
  if (init == InitMode::kRhoBound) {
    return c_tilde[tree.h()] * (1.0 + std::pow(rho, m + 1.0));
  }
  const double y = tree.block(b.root).state_center().norm();
  return c_tilde[tree.h()] * (1.0 + std::pow(y + big_d, m + 1.0));
}

double ValueState::initial_v_tilde(int h, const StateCell& cell) const {
  if (init == InitMode::kRhoBound) {
    return c_tilde[h] * (1.0 + std::pow(rho, m + 1.0));
  }
  return c_tilde[h] * (1.0 + std::pow(cell.center().norm() + big_d, m + 1.0));
}

double ValueState::initial_v_bar(int h, const Vec& x) const {
  if (init == InitMode::kRhoBound) {
    return c_tilde[h] * (1.0 + std::pow(rho, m + 1.0) +
                         std::pow(x.norm(), m + 1.0));
  }
  return c_tilde[h] * (1.0 + std::pow(x.norm(), m + 1.0));
}

double ValueState::outside_q(int h) const {
  return -c_tilde[h] * (1.0 + std::pow(rho, m + 1.0));
}

ValueState make_value_state(const EnvSpec& spec, const ValueConfig& cfg,
                            double rho, double big_d) {
  if (cfg.mc_samples < 1) throw ConfigError("value.mc_samples must be >= 1");
  ValueState vs;
  vs.horizon = spec.horizon;
  vs.m = spec.reg.m;
  vs.rho = rho;
  vs.big_d = big_d;
  vs.init = cfg.init;
  vs.c_tilde.assign(spec.horizon + 1, 0.0);
  vs.c_bar.assign(spec.horizon + 1, 0.0);
  vs.c_h.assign(spec.horizon + 1, 0.0);
  vs.updated.assign(spec.horizon + 1, false);
  for (int h = 1; h <= spec.horizon; ++h) {
    vs.c_tilde[h] = per_h(cfg.c_tilde_per_h, cfg.c_tilde, h);
    vs.c_bar[h] = per_h(cfg.c_bar_per_h, cfg.c_bar, h);
    if (!(vs.c_tilde[h] >= 0.0) || !(vs.c_bar[h] >= 0.0)) {
      throw ConfigError("value constants must be nonnegative");
    }
    vs.c_h[h] = std::max(vs.c_bar[h], std::pow(2.0, vs.m + 1.0) * vs.c_tilde[h]);
  }
  return vs;
}

ValueState init_values(std::vector<PartitionTree>& trees, const EnvSpec& spec,
                       const ValueConfig& cfg) {
  if (int(trees.size()) != spec.horizon) {
    throw LogicError("one partition per timestamp expected");
  }
  ValueState vs = make_value_state(spec, cfg, trees.front().rho(),
                                   trees.front().big_d());
  for (auto& tree : trees) {
    for (const auto& b : tree.blocks()) {
      tree.block(b.id).q_bar = vs.initial_q(tree, b);
    }
    tree.set_outside_q(vs.outside_q(tree.h()));
    for (auto& cell : tree.cells()) {
      cell.v_tilde = vs.initial_v_tilde(tree.h(), cell);
    }
  }
  return vs;
}

VBar::VBar(const PartitionTree& tree, const ValueState& vs)
    : h_(tree.h()),
      m_(vs.m),
      rho_(vs.rho),
      c_h_(vs.c_h[tree.h()]),
      initial_(!vs.updated[tree.h()] || tree.cells().empty()),
      vs_(&vs) {
  if (initial_) return;
  const auto& cells = tree.cells();
  std::vector<int> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::vector<Vec> centers;
  centers.reserve(cells.size());
  for (const auto& c : cells) centers.push_back(c.center());
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return centers[a][0] < centers[b][0];
  });
  v_min_ = std::numeric_limits<double>::infinity();
  for (int i : order) {
    centers_.push_back(centers[i]);
    center_pow_.push_back(std::pow(centers[i].norm(), double(m_)));
    v_.push_back(cells[i].v_tilde);
    key_.push_back(centers[i][0]);
    v_min_ = std::min(v_min_, cells[i].v_tilde);
  }
}

double VBar::inside(const Vec& x, bool prune) const {
  const double x_pow = std::pow(x.norm(), double(m_));
  const double slope = c_h_ * (1.0 + x_pow);
  auto term = [&](std::size_t i) {
    return v_[i] + c_h_ * (1.0 + x_pow + center_pow_[i]) *
                       (x - centers_[i]).norm();
  };
  double best = std::numeric_limits<double>::infinity();
  if (!prune) {
    for (std::size_t i = 0; i < v_.size(); ++i) best = std::min(best, term(i));
    return best;
  }
  // Walk outward from x along the sorted first coordinate. A cell whose first
  // coordinate is t away contributes at least v_min + slope * t.
  const auto n = std::ptrdiff_t(v_.size());
  std::ptrdiff_t right =
      std::lower_bound(key_.begin(), key_.end(), x[0]) - key_.begin();
  std::ptrdiff_t left = right - 1;
  while (left >= 0 || right < n) {
    const double dl = left >= 0 ? x[0] - key_[left]
                                : std::numeric_limits<double>::infinity();
    const double dr = right < n ? key_[right] - x[0]
                                : std::numeric_limits<double>::infinity();
    const bool take_left = dl <= dr;
    const double gap = take_left ? dl : dr;
    if (v_min_ + slope * gap > best) break;
    const std::size_t i = std::size_t(take_left ? left-- : right++);
    best = std::min(best, term(i));
  }
  return best;
}

double VBar::evaluate(const Vec& x, bool prune) const {
  const double r = x.norm();
  if (initial_) return vs_->initial_v_bar(h_, x);
  if (r <= rho_) return inside(x, prune);
  const Vec proj = (rho_ / r) * x;
  return inside(proj, prune) +
         c_h_ * (1.0 + std::pow(r, double(m_)) + std::pow(rho_, double(m_))) *
             (r - rho_);
}

double VBar::operator()(const Vec& x) const { return evaluate(x, true); }

double VBar::brute(const Vec& x) const { return evaluate(x, false); }

double expected_value_next(const VBar& v, const Vec& x_ref, const Vec& mu,
                           const Mat& sigma, double dt, const Mat& normals) {
  const Mat root = psd_sqrt(sigma * dt);
  const Vec mean = x_ref + mu * dt;
  double total = 0.0;
  for (Eigen::Index j = 0; j < normals.cols(); ++j) {
    total += v(mean + root * normals.col(j));
  }
  const double out = total / double(normals.cols());
  if (!std::isfinite(out)) throw NumericalError("non-finite expected value");
  return out;
}

double update_q(const Block& b, double y, const Bonus& bonus, double exp_next,
                int h, int horizon, double q0) {
  if (b.count == 0) return q0;
  const double r_hat = reward_estimate(b.stats);
  const double diam = b.diam();
  const double extra = bonus.uncertainty(y, b.count, h) +
                       bonus.discretization_bias(y, diam, h);
  if (h >= horizon) return r_hat + extra;
  return r_hat + exp_next + extra;
}

double update_v_tilde(PartitionTree& tree, int cell) {
  StateCell& c = tree.cells().at(cell);
  const auto covering = tree.covering_leaves(c.lo, c.hi);
  double q_max = -std::numeric_limits<double>::infinity();
  for (int id : covering) q_max = std::max(q_max, tree.block(id).q_bar);
  c.v_tilde = std::min(c.v_tilde, q_max);
  return c.v_tilde;
}

}  // namespace apl
