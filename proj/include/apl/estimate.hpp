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

#ifndef APL_ESTIMATE_HPP_
#define APL_ESTIMATE_HPP_

#include "apl/common.hpp"

namespace apl {

// Running sufficient statistics of the transitions observed in a block or its
// ancestors. Memory is O(d_s^2) regardless of the number of visits.
struct BlockStats {
  long n = 0;
  Vec sum_dx;
  Mat sum_dx_outer;
  double sum_r = 0.0;

  BlockStats() = default;
  explicit BlockStats(int d_s)
      : sum_dx(Vec::Zero(d_s)), sum_dx_outer(Mat::Zero(d_s, d_s)) {}
};

// Adds one transition increment dx = X_{h+1} - X_h and reward r.
void record_visit(BlockStats& stats, const Vec& dx, double r);

// sum_dx / (n dt); zero when n = 0.
Vec drift_estimate(const BlockStats& stats, double dt);

// One-pass form of the centered sample covariance divided by dt, symmetrized
// and projected onto the PSD cone. Zero when n = 0.
Mat cov_estimate(const BlockStats& stats, double dt);

// sum_r / n; zero when n = 0.
double reward_estimate(const BlockStats& stats);

// Symmetric part of m with negative eigenvalues set to zero.
Mat clip_psd(const Mat& m);

// Symmetric PSD square root, usable where Cholesky fails on singular input.
Mat psd_sqrt(const Mat& m);

}  // namespace apl

#endif  // APL_ESTIMATE_HPP_
