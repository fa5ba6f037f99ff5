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

#include "apl/env.hpp"

using namespace apl;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

}  // namespace

TEST_CASE("mean revert coefficients") {
  auto env = build_mean_revert_env();
  CHECK(env->drift(1, v1(4), v1(0))[0] == doctest::Approx(-0.35).epsilon(1e-12));
  CHECK(env->drift(1, v1(4), v1(10))[0] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(env->vol(3, v1(-7), v1(2))(0, 0) == 0.1);
  CHECK(env->mean_reward(1, v1(4), v1(0)) == 16.0);
  Rng rng(5);
  for (int i = 0; i < 5; ++i) CHECK(env->sample_initial(rng)[0] == 4.0);
}

TEST_CASE("step adds drift and scaled noise") {
  auto env = build_mean_revert_env();
  Rng a(11), b(11), r(3);
  const StepResult s = step(*env, 1, v1(4), v1(10), a, r);
  const double z = standard_normal(b, 1)[0];
  CHECK(s.next_state[0] == doctest::Approx(3.75 + 0.1 * z).epsilon(1e-14));
}

TEST_CASE("reward samples average to the mean reward") {
  auto env = build_mean_revert_env();
  Rng rng(7);
  const long n = 100000;
  double sum = 0.0;
  for (long i = 0; i < n; ++i) sum += env->sample_reward(1, v1(4), v1(0), rng);
  CHECK(std::abs(sum / n - 16.0) <= 3.0 * std::sqrt(0.01 / n));
}

TEST_CASE("step moments match drift and covariance") {
  auto env = build_mean_revert_env();
  Rng rng(9);
  const long n = 100000;
  const Vec x = v1(2), a = v1(3);
  double s1 = 0.0, s2 = 0.0;
  for (long i = 0; i < n; ++i) {
    const double dx = step(*env, 1, x, a, rng).next_state[0] - 2.0;
    s1 += dx;
    s2 += dx * dx;
  }
  const double mean = s1 / n, var = s2 / n - mean * mean;
  const double mu = env->drift(1, x, a)[0];
  CHECK(std::abs(mean - mu) <= 4.0 * 0.1 / std::sqrt(double(n)));
  CHECK(std::abs(var - 0.01) <= 0.1 * 0.01);
}

TEST_CASE("declared Lipschitz constants hold on random points") {
  for (auto env : {build_mean_revert_env(), build_portfolio_env()}) {
    const EnvSpec& spec = env->spec();
    Rng rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> state(-5.0, 5.0);
    auto action = [&]() {
      Vec a(spec.d_a);
      if (const auto* cube = std::get_if<Hypercube>(&spec.action_space)) {
        for (int i = 0; i < spec.d_a; ++i) {
          a[i] = cube->center[i] + cube->half_width * (2.0 * u(rng) - 1.0);
        }
      } else {
        double left = 1.0;
        for (int i = 0; i < spec.d_a; ++i) {
          a[i] = left * u(rng) * 0.5;
          left -= a[i];
        }
      }
      return a;
    };
    int bad_mu = 0, bad_sigma = 0;
    for (int t = 0; t < 10000; ++t) {
      // the portfolio constants are declared on |x| <= 10
      const Vec x1 = Vec::Constant(spec.d_s, state(rng));
      const Vec x2 = Vec::Constant(spec.d_s, state(rng));
      const Vec a1 = action(), a2 = action();
      const double dist = (x1 - x2).norm() + (a1 - a2).norm();
      if ((env->drift(1, x1, a1) - env->drift(1, x2, a2)).norm() >
          spec.reg.l_mu * dist + 1e-12) {
        ++bad_mu;
      }
      if ((env->vol(1, x1, a1) - env->vol(1, x2, a2)).norm() >
          spec.reg.l_sigma * dist + 1e-12) {
        ++bad_sigma;
      }
    }
    CHECK(bad_mu == 0);
    CHECK(bad_sigma == 0);
  }
}

TEST_CASE("portfolio env") {
  auto env = build_portfolio_env();
  const EnvSpec& spec = env->spec();
  CHECK(spec.d_s == 1);
  CHECK(spec.d_a == 5);
  CHECK(spec.horizon == 30);
  CHECK(spec.dt == doctest::Approx(1.0 / 52.0));
  const Vec x = v1(2);
  const Vec zero = Vec::Zero(5);
  CHECK(env->mean_reward(30, x, zero) == doctest::Approx(16.0));
  CHECK(env->mean_reward(29, x, zero) == 0.0);
  CHECK(env->drift(1, x, zero)[0] == doctest::Approx(0.05 * 2.0));
  CHECK(env->vol(1, x, zero).norm() == 0.0);
  const auto warnings = validate_spec(spec, 1.0);
  bool elliptic_warning = false;
  for (const auto& w : warnings) {
    if (w.message.find("ellipticity") != std::string::npos) elliptic_warning = true;
  }
  CHECK(elliptic_warning);
}

TEST_CASE("tiling of the action cube") {
  auto env = build_mean_revert_env();
  CHECK_NOTHROW(require_valid(env->spec(), 10.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(require_valid(env->spec(), 4.0 * std::sqrt(2.0)), ConfigError);
}

TEST_CASE("actions outside the space are rejected") {
  auto env = build_mean_revert_env();
  Rng rng(1);
  CHECK_THROWS_AS(step(*env, 1, v1(0), v1(10.5), rng), InvalidAction);
}
