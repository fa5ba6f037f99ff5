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

#ifndef APL_ENV_HPP_
#define APL_ENV_HPP_

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "apl/common.hpp"

namespace apl {

// Axis-aligned action cube {a : |a_i - center_i| <= half_width}.
struct Hypercube {
  Vec center;
  double half_width = 1.0;
};

// Corner simplex {a : a_i >= 0, sum_i a_i <= 1} of the given dimension.
struct Simplex {
  int dim = 1;
};

using ActionSpace = std::variant<Hypercube, Simplex>;

struct RegularityConstants {
  double l_mu = 0.0;
  double l_sigma = 0.0;
  double l_r = 0.0;
  double l0 = 0.0;
  int m = 0;
  double lambda = 1.0;
  double theta = 0.0;

  // L = max(l_mu, l_sigma).
  double lipschitz() const { return l_mu > l_sigma ? l_mu : l_sigma; }
};

struct EnvSpec {
  int d_s = 1;
  int d_a = 1;
  int horizon = 1;
  double dt = 1.0;
  ActionSpace action_space = Hypercube{Vec::Zero(1), 1.0};
  RegularityConstants reg;
  int moment_order = 8;

  // Half-width for cubes; sup-norm radius 1 for the corner simplex.
  double action_radius() const;
  void check() const;
};

bool action_contains(const ActionSpace& space, const Vec& a, double tol = 1e-9);

// A discrete-time controlled diffusion
//   X_{h+1} = X_h + drift(h, X_h, A_h) dt + vol(h, X_h, A_h) z sqrt(dt).
// vol returns a d_s x noise_dim matrix; the increment covariance per unit time
// is vol * vol^T. Instances are immutable and safe to share.
class Environment {
 public:
  explicit Environment(EnvSpec spec) : spec_(std::move(spec)) { spec_.check(); }
  virtual ~Environment() = default;

  const EnvSpec& spec() const { return spec_; }

  virtual std::string name() const = 0;
  virtual int noise_dim() const { return spec_.d_s; }
  virtual Vec drift(int h, const Vec& x, const Vec& a) const = 0;
  virtual Mat vol(int h, const Vec& x, const Vec& a) const = 0;
  virtual double mean_reward(int h, const Vec& x, const Vec& a) const = 0;
  virtual double sample_reward(int h, const Vec& x, const Vec& a,
                               Rng& rng) const = 0;
  virtual Vec sample_initial(Rng& rng) const = 0;

  Mat covariance(int h, const Vec& x, const Vec& a) const {
    Mat s = vol(h, x, a);
    return s * s.transpose();
  }

 private:
  EnvSpec spec_;
};

struct StepResult {
  Vec next_state;
  double reward = 0.0;
};

// One transition. Noise and reward draws come from separate generators so the
// trajectory stream does not depend on the reward stream.
StepResult step(const Environment& env, int h, const Vec& x, const Vec& a,
                Rng& noise_rng, Rng& reward_rng);
StepResult step(const Environment& env, int h, const Vec& x, const Vec& a,
                Rng& rng);

struct MeanRevertParams {
  double mu0 = 0.05;
  double mean_reversion = 0.1;
  double action_gain = 0.01;
  double sigma = 0.1;
  double action_lo = 0.0;
  double action_hi = 10.0;
  double x1 = 4.0;
  double reward_variance = 0.01;
  int horizon = 10;
  double dt = 1.0;
  // Sub-Gaussian proxy for the reward noise; defaults to reward_variance.
  double theta = -1.0;
};

// mu(x, a) = mu0 - mean_reversion * x + action_gain * a, constant sigma,
// rewards N((x - a)^2, reward_variance), deterministic X_1.
std::shared_ptr<const Environment> build_mean_revert_env(
    const MeanRevertParams& params = {});

struct PortfolioParams {
  int n_assets = 6;
  double r0 = 0.05;
  double b = 0.15;
  double sigma = 0.2;
  double nu = 10.0;
  double x1 = 2.0;
  int horizon = 30;
  double dt = 1.0 / 52.0;
  // Radius of the state region on which the declared Lipschitz constants hold.
  double lipschitz_radius = 10.0;
};

// Wealth dynamics with one risk-free asset and n_assets - 1 identical stocks,
// allocations on the corner simplex, terminal reward (nu - x) x.
std::shared_ptr<const Environment> build_portfolio_env(
    const PortfolioParams& params = {});

struct Diagnostic {
  enum class Level { kWarning, kError };
  Level level;
  std::string message;
};

// Checks block tiling of the action cube (hard error), the moment-order
// condition and ellipticity (warnings). big_d is the root block diameter.
std::vector<Diagnostic> validate_spec(const EnvSpec& spec, double big_d);

// Throws ConfigError on any error-level diagnostic; returns the warnings.
std::vector<std::string> require_valid(const EnvSpec& spec, double big_d);

}  // namespace apl

#endif  // APL_ENV_HPP_
