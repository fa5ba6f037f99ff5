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

#include "apl/oracle.hpp"

using namespace apl;

namespace {

// Drift-free 1D diffusion with small noise, reward g(x) = x at the last step
// and action-free dynamics.
class FlatEnv : public Environment {
 public:
  explicit FlatEnv(double sigma) : Environment(make()), sigma_(sigma) {}
  std::string name() const override { return "flat"; }
  Vec drift(int, const Vec&, const Vec&) const override { return Vec::Zero(1); }
  Mat vol(int, const Vec&, const Vec&) const override {
    return Mat::Constant(1, 1, sigma_);
  }
  double mean_reward(int h, const Vec& x, const Vec&) const override {
    return h == spec().horizon ? x[0] : 0.0;
  }
  double sample_reward(int h, const Vec& x, const Vec& a, Rng&) const override {
    return mean_reward(h, x, a);
  }
  Vec sample_initial(Rng&) const override { return Vec::Constant(1, 1.0); }

 private:
  static EnvSpec make() {
    EnvSpec s;
    s.horizon = 4;
    s.action_space = Hypercube{Vec::Zero(1), 1.0};
    return s;
  }
  double sigma_;
};

GridConfig grid(double lo, double hi, int points, int actions = 101, int gh = 16) {
  GridConfig g;
  g.state_lo = Vec::Constant(1, lo);
  g.state_hi = Vec::Constant(1, hi);
  g.state_points = {points};
  g.action_points = actions;
  g.gh_order = gh;
  return g;
}

}  // namespace

TEST_CASE("Gauss-Hermite rule integrates Gaussian moments") {
  for (int order : {4, 8, 16}) {
    const GaussHermite gh = gauss_hermite(order);
    double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      const double z = gh.nodes[i], w = gh.weights[i];
      m0 += w;
      m2 += w * z * z;
      m4 += w * std::pow(z, 4);
      m6 += w * std::pow(z, 6);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(m6 == doctest::Approx(15.0).epsilon(1e-11));
  }
}

TEST_CASE("one-step problem has the endpoint maximum") {
  MeanRevertParams p;
  p.horizon = 1;
  auto env = build_mean_revert_env(p);
  const DpSolution dp = dp_solve(*env, grid(-10, 10, 201));
  CHECK(std::abs(dp.v_star(1, Vec::Constant(1, 4.0)) - 36.0) <= 0.5);
  CHECK(dp.policy_action(1, Vec::Constant(1, 4.0))[0] == 10.0);
  CHECK(dp.v_star(2, Vec::Constant(1, 4.0)) == 0.0);
}

TEST_CASE("action-free problems give constant Q in the action") {
  FlatEnv env(0.05);
  const DpSolution dp = dp_solve(env, grid(-3, 3, 61, 11));
  for (int h = 1; h <= 4; ++h) {
    for (double x : {-1.0, 0.3, 2.0}) {
      const Vec xs = Vec::Constant(1, x);
      const double q0 = q_star(env, dp, h, xs, Vec::Constant(1, -1.0));
      for (double a : {-0.5, 0.0, 0.7, 1.0}) {
        CHECK(q_star(env, dp, h, xs, Vec::Constant(1, a)) ==
              doctest::Approx(q0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("small noise and no drift keep the terminal reward") {
  FlatEnv env(1e-6);
  const DpSolution dp = dp_solve(env, grid(-3, 3, 61, 5));
  for (double x : {-2.0, 0.5, 1.7}) {
    CHECK(dp.v_star(1, Vec::Constant(1, x)) == doctest::Approx(x).epsilon(1e-6));
  }
}

TEST_CASE("log-log slope") {
  std::vector<double> power, linear, noisy;
  Rng rng(6);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int k = 1; k <= 2000; ++k) {
    power.push_back(std::pow(k, 0.75));
    linear.push_back(3.0 * k);
    noisy.push_back(std::pow(k, 0.69) * (1.0 + 0.01 * noise(rng)));
  }
  CHECK(std::abs(loglog_slope(power, 0.5).slope - 0.75) <= 1e-9);
  CHECK(std::abs(loglog_slope(power, 1.0).slope - 0.75) <= 1e-9);
  CHECK(std::abs(loglog_slope(linear, 0.5).slope - 1.0) <= 1e-9);
  CHECK(std::abs(loglog_slope(noisy, 0.5).slope - 0.69) <= 0.02);
  linear[1500] = 0.0;
  CHECK_THROWS_AS(loglog_slope(linear, 0.5), DataError);
}

TEST_CASE("regret of constant increments") {
  MeanRevertParams p;
  p.horizon = 1;
  auto env = build_mean_revert_env(p);
  const DpSolution dp = dp_solve(*env, grid(-10, 10, 201));
  const Vec x = Vec::Constant(1, 4.0);
  const double v = dp.v_star(1, x);
  std::vector<Vec> starts(50, x);
  std::vector<double> returns(50, v - 2.0);
  const RegretReport r = regret_curve(starts, returns, dp);
  for (std::size_t k = 0; k < 50; ++k) {
    CHECK(r.cumulative[k] == doctest::Approx(2.0 * double(k + 1)));
  }
}

TEST_CASE("the oracle policy has no regret") {
  auto env = build_mean_revert_env();
  const DpSolution dp = dp_solve(*env, grid(-10, 10, 201));
  Rng rng(77);
  const int n = 2000;
  std::vector<Vec> starts;
  std::vector<double> returns;
  for (int k = 0; k < n; ++k) {
    Vec x = env->sample_initial(rng);
    starts.push_back(x);
    double total = 0.0;
    for (int h = 1; h <= env->spec().horizon; ++h) {
      const StepResult s = step(*env, h, x, dp.policy_action(h, x), rng);
      total += s.reward;
      x = s.next_state;
    }
    returns.push_back(total);
  }
  const RegretReport r = regret_curve(starts, returns, dp);
  double mean = 0.0, sq = 0.0;
  for (double d : r.increments) mean += d;
  mean /= n;
  for (double d : r.increments) sq += (d - mean) * (d - mean);
  const double se = std::sqrt(sq / (n - 1) / n);
  CHECK(std::abs(mean) <= 3.0 * se);
}

TEST_CASE("greedy packing") {
  std::vector<Vec> line;
  for (int i = 0; i <= 1000; ++i) line.push_back(Vec::Constant(1, i / 1000.0));
  const auto kept = greedy_packing(line, 0.1);
  CHECK(kept.size() >= 10);
  CHECK(kept.size() <= 11);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      CHECK((line[kept[i]] - line[kept[j]]).norm() > 0.1);
    }
  }

  // a segment in the plane packs like 1/r
  std::vector<Vec> curve;
  for (int i = 0; i <= 4000; ++i) {
    Vec p(2);
    p << i / 4000.0, 0.5 * i / 4000.0;
    curve.push_back(p);
  }
  std::vector<PackingResult> ladder;
  for (double r : {0.1, 0.05, 0.025, 0.0125}) {
    PackingResult pr;
    pr.r = r;
    pr.packing_number = long(greedy_packing(curve, r).size());
    ladder.push_back(pr);
  }
  CHECK(packing_dimension(ladder) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("packing constant") {
  // 2 Gamma(2) a / Gamma(3/2)^2 = 8 a / pi
  CHECK(packing_constant(1, 1, 5.0) == doctest::Approx(40.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("coverage sanity") {
  CoverageConfig cfg;
  cfg.trials = 2000;
  cfg.sizes = {8};
  cfg.width_scale = 10.0;
  for (const auto& c : empirical_coverage(cfg)) {
    CHECK(c.coverage_mu == 1.0);
    CHECK(c.coverage_sigma == 1.0);
  }
  cfg.width_scale = 0.0;
  for (const auto& c : empirical_coverage(cfg)) {
    CHECK(c.coverage_mu <= 0.01);
    CHECK(c.coverage_sigma <= 0.01);
  }
  cfg.trials = 100;
  CHECK_THROWS_AS(empirical_coverage(cfg), ConfigError);
}

TEST_CASE("zero action gap makes every grid point near optimal") {
  FlatEnv env(0.05);
  const DpSolution dp = dp_solve(env, grid(-3, 3, 31, 11));
  PackingConfig pc;
  pc.rho = 3.0;
  pc.big_d = 1.0;
  pc.radii = {0.5};
  const auto res =
      near_optimal_packing(env, dp, 2, pc, [](const Vec&) { return 1e-9; });
  REQUIRE(res.size() == 1);
  CHECK(res[0].near_optimal_points == 31 * 11);
}
