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


#ifndef APL_ORACLE_HPP_
#define APL_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "apl/bonus.hpp"
#include "apl/env.hpp"
#include "apl/learner.hpp"

namespace apl {

// Nodes and weights for E[f(Z)], Z ~ N(0, 1).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermite gauss_hermite(int order);

struct GridConfig {
  Vec state_lo;
  Vec state_hi;
  std::vector<int> state_points;
  // Points per action dimension for cube action spaces.
  int action_points = 101;
  // Lattice resolution for simplex action spaces: coordinates i / res.
  int simplex_resolution = 10;
  int gh_order = 16;
};

// A tensor grid with multilinear interpolation and linear extrapolation.
class StateGrid {
 public:
  StateGrid() = default;
  StateGrid(Vec lo, Vec hi, std::vector<int> points);

  int dim() const { return int(points_.size()); }
  std::size_t size() const { return size_; }
  Vec point(std::size_t index) const;
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const std::vector<int>& points() const { return points_; }
  double spacing(int axis) const;
  double interpolate(const std::vector<double>& values, const Vec& x) const;

 private:
  Vec lo_;
  Vec hi_;
  std::vector<int> points_;
  std::size_t size_ = 0;
};

std::vector<Vec> action_grid(const ActionSpace& space, const GridConfig& cfg);

struct DpSolution {
  GridConfig grid_cfg;
  StateGrid grid;
  std::vector<Vec> actions;
  int horizon = 1;
  // v[h] over grid points for h = 1..H+1; v[H+1] = 0.
  std::vector<std::vector<double>> v;
  // Index into `actions` of a maximizer per grid point, h = 1..H.
  std::vector<std::vector<int>> policy;
  std::vector<std::string> warnings;

  double v_star(int h, const Vec& x) const;
  // Action of the tabulated greedy policy at the nearest grid point.
  const Vec& policy_action(int h, const Vec& x) const;
};

DpSolution dp_solve(const Environment& env, const GridConfig& cfg);

// Q*_h(x, a) = R + E[V*_{h+1}(X')] by quadrature at an arbitrary point.
double q_star(const Environment& env, const DpSolution& dp, int h, const Vec& x,
              const Vec& a);
// Maximizer of q_star over the action grid.
Vec greedy_action(const Environment& env, const DpSolution& dp, int h,
                  const Vec& x);

struct RegretReport {
  std::vector<double> v_star;
  std::vector<double> returns;
  std::vector<double> increments;
  std::vector<double> cumulative;
  std::vector<double> cumulative_clamped;
};

// Per-episode V*_1(X_1^k) minus the supplied return estimates.
RegretReport regret_curve(const std::vector<Vec>& initial_states,
                          const std::vector<double>& returns,
                          const DpSolution& dp);

// Paired re-rollout regret estimate: the frozen learner policy and the DP
// greedy policy are rolled out on the same R noise paths, so most of the
// return noise cancels in the difference.
class PairedEvaluator {
 public:
  PairedEvaluator(std::shared_ptr<const Environment> env, const DpSolution& dp,
                  int rollouts, std::uint64_t seed);

  int rollouts() const { return rollouts_; }
  double baseline() const { return baseline_; }
  // Mean return of the learner's current policy on the shared paths.
  double policy_value(const Learner& learner) const;

 private:
  double rollout(int r, const std::function<Vec(int, const Vec&, Rng&)>& act) const;

  std::shared_ptr<const Environment> env_;
  const DpSolution& dp_;
  int rollouts_;
  std::uint64_t seed_;
  double baseline_ = 0.0;
};

// Increments baseline - value_k with the DP value reported alongside.
RegretReport paired_regret(const std::vector<Vec>& initial_states,
                           const std::vector<double>& policy_values,
                           double baseline, const DpSolution& dp);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double window = 1.0;
};

// OLS of log(cumulative_k) on log(k) over the trailing fraction `window`.
SlopeFit loglog_slope(const std::vector<double>& cumulative, double window);

struct CoverageConfig {
  std::vector<int> dims{1, 3};
  std::vector<long> sizes{4, 64};
  long trials = 10000;
  double delta = 0.1;
  double dt = 0.1;
  double eta = 1.0;
  double d1 = 1.0;
  double d2 = 2.0;
  double d3 = 0.5;
  // Multiplies both widths; 0 checks the degenerate case.
  double width_scale = 1.0;
  std::uint64_t seed = 1;
};

struct CoverageCell {
  int d_s = 1;
  long n = 1;
  double kappa_mu = 0.0;
  double kappa_sigma = 0.0;
  double coverage_mu = 0.0;
  double coverage_sigma = 0.0;
};

// Simulated blocks with known drift and volatility bounded by eta; reports
// how often the drift and covariance deviation events hold.
std::vector<CoverageCell> empirical_coverage(const CoverageConfig& cfg);

// Greedy r-packing: scans points in order and keeps those farther than r
// from every kept point.
std::vector<std::size_t> greedy_packing(const std::vector<Vec>& points,
                                        double r);

struct PackingResult {
  double r = 0.0;
  long near_optimal_points = 0;
  long packing_number = 0;
  double ceiling = 0.0;
};

struct PackingConfig {
  double rho = 1.0;
  double big_d = 1.0;
  std::vector<double> radii{0.8, 0.4, 0.2};
};

// Packing numbers of the near-optimal set at h over the DP grid points with
// |x| <= rho; gbar(x) scales the threshold gbar(x) (H + 1) r.
std::vector<PackingResult> near_optimal_packing(
    const Environment& env, const DpSolution& dp, int h,
    const PackingConfig& cfg, const std::function<double(const Vec&)>& gbar);

// Log-log slope of packing number against 1/r.
double packing_dimension(const std::vector<PackingResult>& results);

// Gamma-function constant bounding the packing number of the partition space.
double packing_constant(int d_s, int d_a, double a_bar);

struct GbarConstants {
  double c_hat_max = 0.0;
  double c_bar_max = 0.0;
  double c_tilde_max = 0.0;
  double c_max = 0.0;
};

std::function<double(const Vec&)> make_gbar(const Bonus& bonus,
                                            const GbarConstants& c, int m,
                                            double big_d);

// Fraction of visited blocks with Q >= Q* at the block center over a trace
// replay on the final partitions.
struct OptimismReport {
  long checked = 0;
  long optimistic = 0;
  double fraction() const { return checked ? double(optimistic) / checked : 0.0; }
};

OptimismReport optimism_check(const Environment& env, const DpSolution& dp,
                              const std::vector<PartitionTree>& trees,
                              const EpisodeTrace& trace);

}  // namespace apl

#endif  // APL_ORACLE_HPP_
