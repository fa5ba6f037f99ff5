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

#include "apl/env.hpp"

#include <cmath>
#include <sstream>

namespace apl {

double EnvSpec::action_radius() const {
  if (const auto* cube = std::get_if<Hypercube>(&action_space)) {
    return cube->half_width;
  }
  return 1.0;
}

void EnvSpec::check() const {
  if (d_s < 1 || d_a < 1) throw ConfigError("dimensions must be positive");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (const auto* cube = std::get_if<Hypercube>(&action_space)) {
    if (!(cube->half_width > 0.0)) {
      throw ConfigError("action half-width must be positive");
    }
    if (cube->center.size() != d_a) {
      throw ConfigError("action center has wrong dimension");
    }
  } else {
    if (std::get<Simplex>(action_space).dim != d_a) {
      throw ConfigError("simplex dimension must equal d_a");
    }
  }
  if (reg.l_mu < 0 || reg.l_sigma < 0 || reg.l_r < 0 || reg.l0 < 0 ||
      reg.m < 0 || reg.lambda < 0 || reg.theta < 0) {
    throw ConfigError("regularity constants must be nonnegative");
  }
  if (moment_order < 1) throw ConfigError("moment order must be positive");
}

bool action_contains(const ActionSpace& space, const Vec& a, double tol) {
  if (const auto* cube = std::get_if<Hypercube>(&space)) {
    if (a.size() != cube->center.size()) return false;
    return ((a - cube->center).cwiseAbs().array() <= cube->half_width + tol)
        .all();
  }
  const auto& simplex = std::get<Simplex>(space);
  if (a.size() != simplex.dim) return false;
  return (a.array() >= -tol).all() && a.sum() <= 1.0 + tol;
}

StepResult step(const Environment& env, int h, const Vec& x, const Vec& a,
                Rng& noise_rng, Rng& reward_rng) {
  const EnvSpec& spec = env.spec();
  if (h < 1 || h > spec.horizon) {
    throw LogicError("timestamp out of range: " + std::to_string(h));
  }
  if (!action_contains(spec.action_space, a)) {
    throw InvalidAction("action outside the action space");
  }
  Vec mu = env.drift(h, x, a);
  Mat sigma = env.vol(h, x, a);
  if (!mu.allFinite() || !sigma.allFinite()) {
    throw NumericalError("non-finite drift or volatility");
  }
  Vec z = standard_normal(noise_rng, sigma.cols());
  StepResult out;
  out.next_state = x + mu * spec.dt + sigma * z * std::sqrt(spec.dt);
  out.reward = env.sample_reward(h, x, a, reward_rng);
  return out;
}

StepResult step(const Environment& env, int h, const Vec& x, const Vec& a,
                Rng& rng) {
  return step(env, h, x, a, rng, rng);
}

namespace {

class MeanRevertEnv final : public Environment {
 public:
  MeanRevertEnv(EnvSpec spec, MeanRevertParams p)
      : Environment(std::move(spec)), p_(p) {}

  std::string name() const override { return "mean_revert_1d"; }

  Vec drift(int, const Vec& x, const Vec& a) const override {
    Vec out(1);
    out[0] = p_.mu0 - p_.mean_reversion * x[0] + p_.action_gain * a[0];
    return out;
  }

  Mat vol(int, const Vec&, const Vec&) const override {
    return Mat::Constant(1, 1, p_.sigma);
  }

  double mean_reward(int, const Vec& x, const Vec& a) const override {
    const double d = x[0] - a[0];
    return d * d;
  }

  double sample_reward(int h, const Vec& x, const Vec& a,
                       Rng& rng) const override {
    std::normal_distribution<double> noise(0.0, std::sqrt(p_.reward_variance));
    return mean_reward(h, x, a) + noise(rng);
  }

  Vec sample_initial(Rng&) const override { return Vec::Constant(1, p_.x1); }

 private:
  MeanRevertParams p_;
};

class PortfolioEnv final : public Environment {
 public:
  PortfolioEnv(EnvSpec spec, PortfolioParams p)
      : Environment(std::move(spec)), p_(p) {}

  std::string name() const override { return "portfolio"; }
  int noise_dim() const override { return p_.n_assets - 1; }

  Vec drift(int, const Vec& x, const Vec& a) const override {
    Vec out(1);
    out[0] = (p_.r0 + (p_.b - p_.r0) * a.sum()) * x[0];
    return out;
  }

  // One independent Gaussian driver per stock.
  Mat vol(int, const Vec& x, const Vec& a) const override {
    Mat out(1, p_.n_assets - 1);
    for (int i = 0; i < p_.n_assets - 1; ++i) out(0, i) = p_.sigma * x[0] * a[i];
    return out;
  }

  double mean_reward(int h, const Vec& x, const Vec&) const override {
    if (h < spec().horizon) return 0.0;
    return (p_.nu - x[0]) * x[0];
  }

  double sample_reward(int h, const Vec& x, const Vec& a,
                       Rng&) const override {
    return mean_reward(h, x, a);
  }

  Vec sample_initial(Rng&) const override { return Vec::Constant(1, p_.x1); }

 private:
  PortfolioParams p_;
};

}  // namespace

std::shared_ptr<const Environment> build_mean_revert_env(
    const MeanRevertParams& p) {
  if (!(p.action_hi > p.action_lo)) throw ConfigError("empty action interval");
  if (!(p.sigma >= 0.0) || !(p.reward_variance >= 0.0)) {
    throw ConfigError("variances must be nonnegative");
  }
  EnvSpec spec;
  spec.d_s = 1;
  spec.d_a = 1;
  spec.horizon = p.horizon;
  spec.dt = p.dt;
  spec.action_space = Hypercube{Vec::Constant(1, 0.5 * (p.action_lo + p.action_hi)),
                                0.5 * (p.action_hi - p.action_lo)};
  const double a_max = std::max(std::abs(p.action_lo), std::abs(p.action_hi));
  spec.reg.l_mu = std::max(p.mean_reversion, p.action_gain);
  spec.reg.l_sigma = 0.0;
  // |(x1-a1)^2 - (x2-a2)^2| <= (|x1| + |x2| + 2 a_max) (|dx| + |da|).
  spec.reg.l_r = std::max(1.0, 2.0 * a_max);
  spec.reg.l0 = std::max({std::abs(p.mu0), p.sigma, 0.0});
  spec.reg.m = 1;
  spec.reg.lambda = p.sigma * p.sigma;
  spec.reg.theta = p.theta >= 0.0 ? p.theta : p.reward_variance;
  spec.moment_order = 8;
  return std::make_shared<MeanRevertEnv>(std::move(spec), p);
}

std::shared_ptr<const Environment> build_portfolio_env(
    const PortfolioParams& p) {
  if (p.n_assets < 2) throw ConfigError("portfolio needs at least 2 assets");
  if (!(p.r0 > 0.0) || !(p.b > p.r0)) {
    throw ConfigError("portfolio requires b > r0 > 0");
  }
  if (!(p.sigma > 0.0)) throw ConfigError("portfolio requires sigma > 0");
  EnvSpec spec;
  spec.d_s = 1;
  spec.d_a = p.n_assets - 1;
  spec.horizon = p.horizon;
  spec.dt = p.dt;
  spec.action_space = Simplex{p.n_assets - 1};
  const double rho = p.lipschitz_radius;
  const double excess = p.b - p.r0;
  // Bilinear coefficients: Lipschitz only on |x| <= rho.
  spec.reg.l_mu = std::max(p.b, rho * excess * std::sqrt(p.n_assets - 1.0));
  spec.reg.l_sigma = p.sigma * std::max(1.0, rho);
  spec.reg.l_r = p.nu;
  spec.reg.l0 = 0.0;
  spec.reg.m = 1;
  spec.reg.lambda = 0.0;
  spec.reg.theta = 0.0;
  spec.moment_order = 8;
  return std::make_shared<PortfolioEnv>(std::move(spec), p);
}

std::vector<Diagnostic> validate_spec(const EnvSpec& spec, double big_d) {
  std::vector<Diagnostic> out;
  if (const auto* cube = std::get_if<Hypercube>(&spec.action_space)) {
    if (!(big_d > 0.0)) {
      out.push_back({Diagnostic::Level::kError, "D must be positive"});
    } else {
      const double side = big_d / std::sqrt(double(spec.d_s + spec.d_a));
      const double tiles = 2.0 * cube->half_width / side;
      if (std::abs(tiles - std::round(tiles)) > 1e-9 * std::max(1.0, tiles) ||
          std::round(tiles) < 1.0) {
        std::ostringstream msg;
        msg << "block side " << side << " tiles the action side "
            << 2.0 * cube->half_width << " " << tiles
            << " times; must be a positive integer";
        out.push_back({Diagnostic::Level::kError, msg.str()});
      }
    }
  }
  const double m1 = spec.reg.m + 1.0;
  const double p = spec.moment_order;
  const double bound = m1 * m1 * (spec.d_s + spec.d_a + 2.0) +
                       m1 * (2.0 * spec.d_s + 2.0 * spec.reg.m + 4.0);
  if (!(p * p > bound)) {
    std::ostringstream msg;
    msg << "moment order p=" << spec.moment_order << " fails p^2 > " << bound;
    out.push_back({Diagnostic::Level::kWarning, msg.str()});
  }
  if (!(spec.reg.lambda > 0.0)) {
    out.push_back({Diagnostic::Level::kWarning,
                   "ellipticity violated; theoretical guarantees void"});
  }
  return out;
}

std::vector<std::string> require_valid(const EnvSpec& spec, double big_d) {
  std::vector<std::string> warnings;
  for (const auto& d : validate_spec(spec, big_d)) {
    if (d.level == Diagnostic::Level::kError) throw ConfigError(d.message);
    warnings.push_back(d.message);
  }
  return warnings;
}

}  // namespace apl
