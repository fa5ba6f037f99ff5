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

#include "apl/estimate.hpp"

using namespace apl;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

}  // namespace

TEST_CASE("record_visit accumulates sums") {
  BlockStats s(1);
  record_visit(s, v1(1), 2.0);
  CHECK(s.n == 1);
  CHECK(s.sum_dx[0] == 1.0);
  CHECK(s.sum_dx_outer(0, 0) == 1.0);
  CHECK(s.sum_r == 2.0);
  record_visit(s, v1(3), 0.0);
  CHECK(s.sum_dx[0] == 4.0);
  CHECK(s.sum_dx_outer(0, 0) == 10.0);
  CHECK_THROWS_AS(record_visit(s, v1(NAN), 0.0), NumericalError);
}

TEST_CASE("estimators on two increments") {
  BlockStats s(1);
  record_visit(s, v1(1), 2.0);
  record_visit(s, v1(3), 4.0);
  CHECK(drift_estimate(s, 1.0)[0] == 2.0);
  CHECK(drift_estimate(s, 0.5)[0] == 4.0);
  CHECK(cov_estimate(s, 1.0)(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(reward_estimate(s) == 3.0);
  BlockStats empty(2);
  CHECK(drift_estimate(empty, 1.0).isZero());
  CHECK(cov_estimate(empty, 1.0).isZero());
  CHECK(reward_estimate(empty) == 0.0);
  BlockStats same(1);
  for (int i = 0; i < 5; ++i) record_visit(same, v1(0.3), 0.0);
  CHECK(std::abs(cov_estimate(same, 1.0)(0, 0)) < 1e-15);
}

TEST_CASE("one-pass covariance equals the centered two-pass sum") {
  Rng rng(21);
  std::uniform_int_distribution<int> count(2, 60);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const int n = count(rng);
    const double dt = scale(rng);
    std::vector<Vec> dx;
    BlockStats s(d);
    for (int i = 0; i < n; ++i) {
      dx.push_back(scale(rng) * standard_normal(rng, d) + Vec::Constant(d, 1.5));
      record_visit(s, dx.back(), 0.0);
    }
    Vec mean = Vec::Zero(d);
    for (const auto& v : dx) mean += v;
    mean /= n;
    Mat two_pass = Mat::Zero(d, d);
    for (const auto& v : dx) two_pass += (v - mean) * (v - mean).transpose();
    two_pass /= n * dt;
    const Mat one_pass = cov_estimate(s, dt);
    CHECK((one_pass - two_pass).norm() <= 1e-9 * two_pass.norm());
  }
}

TEST_CASE("estimators are consistent") {
  Rng rng(4);
  BlockStats s(1);
  std::normal_distribution<double> inc(0.5, 0.2);
  for (int i = 0; i < 10000; ++i) record_visit(s, v1(inc(rng)), 0.0);
  CHECK(std::abs(cov_estimate(s, 1.0)(0, 0) - 0.04) <= 0.1 * 0.04);
  CHECK(drift_estimate(s, 1.0)[0] == doctest::Approx(0.5).epsilon(0.02));

  BlockStats r(1);
  std::normal_distribution<double> reward(36.0, 0.1);
  const long n = 100000;
  for (long i = 0; i < n; ++i) record_visit(r, v1(0), reward(rng));
  CHECK(std::abs(reward_estimate(r) - 36.0) <= 4.0 * std::sqrt(0.01 / n));
}

TEST_CASE("covariance output is symmetric PSD") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    BlockStats s(3);
    for (int i = 0; i < 3; ++i) record_visit(s, standard_normal(rng, 3), 0.0);
    const Mat c = cov_estimate(s, 1.0);
    CHECK((c - c.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Mat> eig(c);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
  }
}
