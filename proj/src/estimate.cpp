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

#include "apl/estimate.hpp"

#include <cmath>

namespace apl {

void record_visit(BlockStats& stats, const Vec& dx, double r) {
  if (!dx.allFinite() || !std::isfinite(r)) {
    throw NumericalError("non-finite transition recorded");
  }
  if (stats.sum_dx.size() == 0) {
    stats.sum_dx = Vec::Zero(dx.size());
    stats.sum_dx_outer = Mat::Zero(dx.size(), dx.size());
  }
  stats.n += 1;
  stats.sum_dx += dx;
  stats.sum_dx_outer.noalias() += dx * dx.transpose();
  stats.sum_r += r;
}

Vec drift_estimate(const BlockStats& stats, double dt) {
  if (stats.n == 0) return Vec::Zero(stats.sum_dx.size());
  return stats.sum_dx / (double(stats.n) * dt);
}

Mat clip_psd(const Mat& m) {
  Mat sym = 0.5 * (m + m.transpose());
  if (sym.rows() == 1) {
    sym(0, 0) = std::max(sym(0, 0), 0.0);
    return sym;
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  Vec values = eig.eigenvalues().cwiseMax(0.0);
  const Mat out = eig.eigenvectors() * values.asDiagonal() *
                  eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Mat psd_sqrt(const Mat& m) {
  if (m.rows() == 1) {
    if (!(m(0, 0) >= 0.0)) throw NumericalError("negative variance");
    return Mat::Constant(1, 1, std::sqrt(m(0, 0)));
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (m + m.transpose()));
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed");
  }
  Vec roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Mat out = eig.eigenvectors() * roots.asDiagonal() *
            eig.eigenvectors().transpose();
  if (!out.allFinite()) throw NumericalError("non-finite covariance factor");
  return out;
}

Mat cov_estimate(const BlockStats& stats, double dt) {
  const auto d = stats.sum_dx.size();
  if (stats.n == 0) return Mat::Zero(d, d);
  const double n = double(stats.n);
  // sum (dx - mean)(dx - mean)^T = sum dx dx^T - n mean mean^T
  const Vec mean = stats.sum_dx / n;
  Mat centered = stats.sum_dx_outer - n * mean * mean.transpose();
  return clip_psd(centered / (n * dt));
}

double reward_estimate(const BlockStats& stats) {
  if (stats.n == 0) return 0.0;
  return stats.sum_r / double(stats.n);
}

}  // namespace apl
