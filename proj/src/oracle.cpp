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


#include "apl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

#include "apl/estimate.hpp"

namespace apl {

GaussHermite gauss_hermite(int order) {
  if (order < 1) throw ConfigError("Gauss-Hermite order must be >= 1");
  // Jacobi matrix of the probabilists' Hermite polynomials.
  Mat jacobi = Mat::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(double(i));
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(jacobi);
  GaussHermite out;
  for (int i = 0; i < order; ++i) {
    out.nodes.push_back(eig.eigenvalues()[i]);
    const double v0 = eig.eigenvectors()(0, i);
    out.weights.push_back(v0 * v0);
  }
  return out;
}

StateGrid::StateGrid(Vec lo, Vec hi, std::vector<int> points)
    : lo_(std::move(lo)), hi_(std::move(hi)), points_(std::move(points)) {
  if (lo_.size() != hi_.size() || lo_.size() != Eigen::Index(points_.size())) {
    throw ConfigError("state grid bounds and point counts disagree");
  }
  size_ = 1;
  for (int i = 0; i < dim(); ++i) {
    if (points_[i] < 2 || !(hi_[i] > lo_[i])) {
      throw ConfigError("state grid needs >= 2 points and hi > lo per axis");
    }
    size_ *= std::size_t(points_[i]);
  }
}

double StateGrid::spacing(int axis) const {
  return (hi_[axis] - lo_[axis]) / (points_[axis] - 1);
}

Vec StateGrid::point(std::size_t index) const {
  Vec x(dim());
  for (int i = 0; i < dim(); ++i) {
    const auto k = index % std::size_t(points_[i]);
    index /= std::size_t(points_[i]);
    x[i] = lo_[i] + spacing(i) * double(k);
  }
  return x;
}

double StateGrid::interpolate(const std::vector<double>& values,
                              const Vec& x) const {
  const int d = dim();
  std::vector<std::size_t> base(d);
  std::vector<double> frac(d);
  std::size_t stride = 1;
  std::vector<std::size_t> strides(d);
  for (int i = 0; i < d; ++i) {
    const double t = (x[i] - lo_[i]) / spacing(i);
    const double cell =
        std::clamp(std::floor(t), 0.0, double(points_[i] - 2));
    base[i] = std::size_t(cell);
    frac[i] = t - cell;
    strides[i] = stride;
    stride *= std::size_t(points_[i]);
  }
  double out = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) {
      const bool up = (corner >> i) & 1;
      w *= up ? frac[i] : 1.0 - frac[i];
      idx += (base[i] + (up ? 1 : 0)) * strides[i];
    }
    out += w * values[idx];
  }
  return out;
}

namespace {

void simplex_lattice(int dim, int res, int remaining, Vec& current, int axis,
                     std::vector<Vec>& out) {
  if (axis == dim) {
    out.push_back(current / double(res));
    return;
  }
  for (int i = 0; i <= remaining; ++i) {
    current[axis] = i;
    simplex_lattice(dim, res, remaining - i, current, axis + 1, out);
  }
}

// Normal quadrature nodes in d dimensions as (points, weights).
void tensor_nodes(const GaussHermite& gh, int d, std::vector<Vec>& points,
                  std::vector<double>& weights) {
  const int q = int(gh.nodes.size());
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= std::size_t(q);
  points.assign(total, Vec::Zero(d));
  weights.assign(total, 1.0);
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t rest = j;
    for (int i = 0; i < d; ++i) {
      const auto k = rest % std::size_t(q);
      rest /= std::size_t(q);
      points[j][i] = gh.nodes[k];
      weights[j] *= gh.weights[k];
    }
  }
}

struct Quadrature {
  std::vector<Vec> points;
  std::vector<double> weights;
};

double bellman(const Environment& env, const StateGrid& grid,
               const std::vector<double>& v_next, const Quadrature& quad,
               int h, const Vec& x, const Vec& a) {
  const EnvSpec& spec = env.spec();
  double q = env.mean_reward(h, x, a);
  if (h >= spec.horizon) return q;
  const Vec mean = x + env.drift(h, x, a) * spec.dt;
  const Mat root = psd_sqrt(env.covariance(h, x, a) * spec.dt);
  double e = 0.0;
  for (std::size_t j = 0; j < quad.points.size(); ++j) {
    e += quad.weights[j] * grid.interpolate(v_next, mean + root * quad.points[j]);
  }
  return q + e;
}

Quadrature make_quadrature(int d_s, int order) {
  Quadrature quad;
  tensor_nodes(gauss_hermite(order), d_s, quad.points, quad.weights);
  return quad;
}

template <typename F>
void parallel_for(std::size_t n, F&& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, std::max<std::size_t>(1, n / 16));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<Vec> action_grid(const ActionSpace& space, const GridConfig& cfg) {
  std::vector<Vec> out;
  if (const auto* cube = std::get_if<Hypercube>(&space)) {
    const int d = int(cube->center.size());
    const int n = cfg.action_points;
    if (n < 1) throw ConfigError("oracle.action_points must be >= 1");
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= std::size_t(n);
    for (std::size_t j = 0; j < total; ++j) {
      Vec a(d);
      std::size_t rest = j;
      for (int i = 0; i < d; ++i) {
        const auto k = rest % std::size_t(n);
        rest /= std::size_t(n);
        const double t = n == 1 ? 0.5 : double(k) / (n - 1);
        a[i] = cube->center[i] - cube->half_width + 2.0 * cube->half_width * t;
      }
      out.push_back(a);
    }
    return out;
  }
  const int d = std::get<Simplex>(space).dim;
  if (cfg.simplex_resolution < 1) {
    throw ConfigError("oracle.simplex_resolution must be >= 1");
  }
  Vec current = Vec::Zero(d);
  simplex_lattice(d, cfg.simplex_resolution, cfg.simplex_resolution, current, 0,
                  out);
  return out;
}

double DpSolution::v_star(int h, const Vec& x) const {
  return grid.interpolate(v.at(h), x);
}

const Vec& DpSolution::policy_action(int h, const Vec& x) const {
  std::size_t index = 0;
  std::size_t stride = 1;
  for (int i = 0; i < grid.dim(); ++i) {
    const double t = std::round((x[i] - grid.lo()[i]) / grid.spacing(i));
    const auto k = std::size_t(std::clamp(t, 0.0, double(grid.points()[i] - 1)));
    index += k * stride;
    stride *= std::size_t(grid.points()[i]);
  }
  return actions.at(std::size_t(policy.at(h).at(index)));
}

DpSolution dp_solve(const Environment& env, const GridConfig& cfg) {
  const EnvSpec& spec = env.spec();
  if (spec.d_s > 2) throw ConfigError("the DP oracle supports d_s <= 2");
  if (cfg.state_lo.size() != spec.d_s) {
    throw ConfigError("oracle grid dimension differs from the state dimension");
  }
  DpSolution dp;
  dp.grid_cfg = cfg;
  dp.grid = StateGrid(cfg.state_lo, cfg.state_hi, cfg.state_points);
  dp.actions = action_grid(spec.action_space, cfg);
  dp.horizon = spec.horizon;
  const Quadrature quad = make_quadrature(spec.d_s, cfg.gh_order);

  const std::size_t ns = dp.grid.size();
  dp.v.assign(spec.horizon + 2, std::vector<double>(ns, 0.0));
  dp.policy.assign(spec.horizon + 1, std::vector<int>(ns, 0));

  {
    // The spread of one step should cover a few grid cells.
    const Vec mid = 0.5 * (cfg.state_lo + cfg.state_hi);
    const Vec& a = dp.actions[dp.actions.size() / 2];
    const double spread =
        3.0 * std::sqrt(env.covariance(1, mid, a).trace() * spec.dt);
    for (int i = 0; i < spec.d_s; ++i) {
      if (dp.grid.spacing(i) > spread) {
        dp.warnings.push_back(
            "state grid spacing exceeds 3 sigma sqrt(dt); refine the grid");
        break;
      }
    }
  }

  for (int h = spec.horizon; h >= 1; --h) {
    const auto& v_next = dp.v[h + 1];
    auto& v_h = dp.v[h];
    auto& pol = dp.policy[h];
    parallel_for(ns, [&](std::size_t i) {
      const Vec x = dp.grid.point(i);
      double best = -std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t j = 0; j < dp.actions.size(); ++j) {
        const double q = bellman(env, dp.grid, v_next, quad, h, x, dp.actions[j]);
        if (q > best) {
          best = q;
          arg = int(j);
        }
      }
      v_h[i] = best;
      pol[i] = arg;
    });
  }
  return dp;
}

double q_star(const Environment& env, const DpSolution& dp, int h, const Vec& x,
              const Vec& a) {
  const Quadrature quad = make_quadrature(env.spec().d_s, dp.grid_cfg.gh_order);
  return bellman(env, dp.grid, dp.v.at(h + 1), quad, h, x, a);
}

Vec greedy_action(const Environment& env, const DpSolution& dp, int h,
                  const Vec& x) {
  const Quadrature quad = make_quadrature(env.spec().d_s, dp.grid_cfg.gh_order);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t j = 0; j < dp.actions.size(); ++j) {
    const double q = bellman(env, dp.grid, dp.v.at(h + 1), quad, h, x,
                             dp.actions[j]);
    if (q > best) {
      best = q;
      arg = j;
    }
  }
  return dp.actions[arg];
}

RegretReport regret_curve(const std::vector<Vec>& initial_states,
                          const std::vector<double>& returns,
                          const DpSolution& dp) {
  if (initial_states.size() != returns.size()) {
    throw DataError("initial states and returns differ in length");
  }
  RegretReport r;
  double cum = 0.0;
  double cum_clamped = 0.0;
  for (std::size_t k = 0; k < returns.size(); ++k) {
    const double v = dp.v_star(1, initial_states[k]);
    const double inc = v - returns[k];
    cum += inc;
    cum_clamped += std::max(inc, 0.0);
    r.v_star.push_back(v);
    r.returns.push_back(returns[k]);
    r.increments.push_back(inc);
    r.cumulative.push_back(cum);
    r.cumulative_clamped.push_back(cum_clamped);
  }
  return r;
}

PairedEvaluator::PairedEvaluator(std::shared_ptr<const Environment> env,
                                 const DpSolution& dp, int rollouts,
                                 std::uint64_t seed)
    : env_(std::move(env)), dp_(dp), rollouts_(rollouts), seed_(seed) {
  if (rollouts < 1) throw ConfigError("oracle.rollouts must be >= 1");
  double total = 0.0;
  for (int r = 0; r < rollouts_; ++r) {
    total += rollout(r, [this](int h, const Vec& x, Rng&) {
      return dp_.policy_action(h, x);
    });
  }
  baseline_ = total / rollouts_;
}

double PairedEvaluator::rollout(
    int r, const std::function<Vec(int, const Vec&, Rng&)>& act) const {
  const std::uint64_t salt = std::uint64_t(r) * 4;
  Rng noise = make_stream(seed_, Stream::kEvaluation, salt);
  Rng reward = make_stream(seed_, Stream::kEvaluation, salt + 1);
  Rng initial = make_stream(seed_, Stream::kEvaluation, salt + 2);
  Rng action = make_stream(seed_, Stream::kEvaluation, salt + 3);
  Vec x = env_->sample_initial(initial);
  double ret = 0.0;
  for (int h = 1; h <= env_->spec().horizon; ++h) {
    const Vec a = act(h, x, action);
    StepResult s = step(*env_, h, x, a, noise, reward);
    ret += s.reward;
    x = std::move(s.next_state);
  }
  return ret;
}

double PairedEvaluator::policy_value(const Learner& learner) const {
  double total = 0.0;
  for (int r = 0; r < rollouts_; ++r) {
    total += rollout(r, [&learner](int h, const Vec& x, Rng& rng) {
      return learner.act(h, x, rng);
    });
  }
  return total / rollouts_;
}

RegretReport paired_regret(const std::vector<Vec>& initial_states,
                           const std::vector<double>& policy_values,
                           double baseline, const DpSolution& dp) {
  if (initial_states.size() != policy_values.size()) {
    throw DataError("initial states and policy values differ in length");
  }
  RegretReport r;
  double cum = 0.0;
  double cum_clamped = 0.0;
  for (std::size_t k = 0; k < policy_values.size(); ++k) {
    const double inc = baseline - policy_values[k];
    cum += inc;
    cum_clamped += std::max(inc, 0.0);
    r.v_star.push_back(dp.v_star(1, initial_states[k]));
    r.returns.push_back(policy_values[k]);
    r.increments.push_back(inc);
    r.cumulative.push_back(cum);
    r.cumulative_clamped.push_back(cum_clamped);
  }
  return r;
}

SlopeFit loglog_slope(const std::vector<double>& cumulative, double window) {
  if (!(window > 0.0 && window <= 1.0)) {
    throw DataError("slope window must lie in (0, 1]");
  }
  const std::size_t n = cumulative.size();
  const auto start = std::size_t(std::floor((1.0 - window) * double(n)));
  if (n < 2 || n - start < 2) throw DataError("slope window has < 2 points");
  std::vector<double> lx, ly;
  for (std::size_t k = start; k < n; ++k) {
    if (!(cumulative[k] > 0.0)) {
      throw DataError("nonpositive cumulative regret in the slope window");
    }
    lx.push_back(std::log(double(k + 1)));
    ly.push_back(std::log(cumulative[k]));
  }
  const double m = double(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  SlopeFit fit;
  fit.window = window;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::vector<CoverageCell> empirical_coverage(const CoverageConfig& cfg) {
  if (cfg.trials < 1000) throw ConfigError("coverage needs >= 1000 trials");
  std::vector<CoverageCell> out;
  for (int d : cfg.dims) {
    EnvSpec spec;
    spec.d_s = d;
    spec.d_a = 1;
    spec.horizon = 1;
    spec.dt = cfg.dt;
    spec.action_space = Hypercube{Vec::Zero(1), 0.0};
    spec.reg.l0 = cfg.eta;
    spec.reg.lambda = 1.0;
    BonusConfig bc;
    bc.mode = BonusMode::kTheoretical;
    bc.delta = cfg.delta;
    bc.d1 = cfg.d1;
    bc.d2 = cfg.d2;
    bc.d3 = cfg.d3;
    bc.c_bar_max = 1.0;
    bc.k_total = 1;
    const Bonus bonus(spec, bc, 1.0);
    for (long n : cfg.sizes) {
      CoverageCell cell;
      cell.d_s = d;
      cell.n = n;
      cell.kappa_mu = cfg.width_scale * bonus.kappa_mu(0.0, n);
      cell.kappa_sigma = cfg.width_scale * bonus.kappa_sigma(0.0, n);
      Rng rng = make_stream(cfg.seed, Stream::kEvaluation,
                            std::uint64_t(d) * 100003 + std::uint64_t(n));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      long hit_mu = 0, hit_sigma = 0;
      const double dt = cfg.dt;
      for (long t = 0; t < cfg.trials; ++t) {
        std::vector<Vec> mus(n);
        Vec sum_dx = Vec::Zero(d);
        std::vector<Vec> dxs(n);
        Mat mean_cov = Mat::Zero(d, d);
        for (long i = 0; i < n; ++i) {
          Vec x(d);
          for (int j = 0; j < d; ++j) x[j] = unit(rng);
          // |mu| <= eta / 2 and the volatility has operator norm <= eta.
          mus[i] = cfg.eta * (x - Vec::Constant(d, 0.5)) / std::sqrt(double(d));
          const Mat sigma = cfg.eta * (0.6 * Mat::Identity(d, d) +
                                       0.4 * Mat(x.asDiagonal()));
          dxs[i] = mus[i] * dt + sigma * standard_normal(rng, d) * std::sqrt(dt);
          sum_dx += dxs[i];
          mean_cov += sigma * sigma.transpose();
        }
        Vec mu_bar = Vec::Zero(d);
        for (const auto& m : mus) mu_bar += m;
        mu_bar /= double(n);
        mean_cov /= double(n);
        const Vec mu_hat = sum_dx / (double(n) * dt);
        if ((mu_hat - mu_bar).norm() <= cell.kappa_mu) ++hit_mu;
        Mat tilde = Mat::Zero(d, d);
        Mat expected = mean_cov;
        for (long i = 0; i < n; ++i) {
          const Vec c = dxs[i] - dt * mu_bar;
          tilde += c * c.transpose();
          const Vec s = mus[i] - mu_bar;
          expected += (dt / double(n)) * s * s.transpose();
        }
        tilde /= double(n) * dt;
        Eigen::SelfAdjointEigenSolver<Mat> eig(tilde - expected,
                                               Eigen::EigenvaluesOnly);
        const double op = eig.eigenvalues().cwiseAbs().maxCoeff();
        if (op <= cell.kappa_sigma) ++hit_sigma;
      }
      cell.coverage_mu = double(hit_mu) / double(cfg.trials);
      cell.coverage_sigma = double(hit_sigma) / double(cfg.trials);
      out.push_back(cell);
    }
  }
  return out;
}

std::vector<std::size_t> greedy_packing(const std::vector<Vec>& points,
                                        double r) {
  if (!(r > 0.0)) throw ConfigError("packing radius must be positive");
  std::vector<std::size_t> kept;
  if (points.empty()) return kept;
  const int d = int(points.front().size());
  using Key = std::vector<long>;
  std::map<Key, std::vector<std::size_t>> buckets;
  auto key_of = [&](const Vec& p) {
    Key k(d);
    for (int i = 0; i < d; ++i) k[i] = long(std::floor(p[i] / r));
    return k;
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Key k = key_of(points[i]);
    bool clear = true;
    int combos = 1;
    for (int j = 0; j < d; ++j) combos *= 3;
    for (int c = 0; c < combos && clear; ++c) {
      Key nb = k;
      int rest = c;
      for (int j = 0; j < d; ++j) {
        nb[j] += rest % 3 - 1;
        rest /= 3;
      }
      auto it = buckets.find(nb);
      if (it == buckets.end()) continue;
      for (std::size_t other : it->second) {
        if ((points[other] - points[i]).norm() <= r) {
          clear = false;
          break;
        }
      }
    }
    if (clear) {
      kept.push_back(i);
      buckets[k].push_back(i);
    }
  }
  return kept;
}

double packing_constant(int d_s, int d_a, double a_bar) {
  return std::pow(2.0, d_s) * std::tgamma((d_s + d_a) / 2.0 + 1.0) *
         std::pow(a_bar, d_a) /
         (std::tgamma(d_s / 2.0 + 1.0) * std::tgamma(d_a / 2.0 + 1.0));
}

std::vector<PackingResult> near_optimal_packing(
    const Environment& env, const DpSolution& dp, int h,
    const PackingConfig& cfg, const std::function<double(const Vec&)>& gbar) {
  const EnvSpec& spec = env.spec();
  const Quadrature quad = make_quadrature(spec.d_s, dp.grid_cfg.gh_order);
  struct Candidate {
    Vec z;
    double gap;
    double scale;
  };
  std::vector<Candidate> cand;
  for (std::size_t i = 0; i < dp.grid.size(); ++i) {
    const Vec x = dp.grid.point(i);
    if (x.norm() > cfg.rho) continue;
    std::vector<double> q(dp.actions.size());
    for (std::size_t j = 0; j < dp.actions.size(); ++j) {
      q[j] = bellman(env, dp.grid, dp.v.at(h + 1), quad, h, x, dp.actions[j]);
    }
    const double v = *std::max_element(q.begin(), q.end());
    const double scale = gbar(x);
    for (std::size_t j = 0; j < dp.actions.size(); ++j) {
      Vec z(spec.d_s + spec.d_a);
      z << x, dp.actions[j];
      cand.push_back({std::move(z), v - q[j], scale});
    }
  }
  const double c_sa =
      packing_constant(spec.d_s, spec.d_a, spec.action_radius());
  std::vector<PackingResult> out;
  for (double r : cfg.radii) {
    std::vector<Vec> pts;
    for (const auto& c : cand) {
      if (c.gap <= c.scale * (spec.horizon + 1) * r) pts.push_back(c.z);
    }
    PackingResult res;
    res.r = r;
    res.near_optimal_points = long(pts.size());
    res.packing_number = long(greedy_packing(pts, r).size());
    res.ceiling = c_sa * std::pow(cfg.rho, spec.d_s) /
                  std::pow(r, spec.d_s + spec.d_a);
    out.push_back(res);
  }
  return out;
}

double packing_dimension(const std::vector<PackingResult>& results) {
  std::vector<double> lx, ly;
  for (const auto& r : results) {
    if (r.packing_number < 1) continue;
    lx.push_back(std::log(1.0 / r.r));
    ly.push_back(std::log(double(r.packing_number)));
  }
  if (lx.size() < 2) throw DataError("need two nonempty packings for a slope");
  const double m = double(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxy / sxx;
}

std::function<double(const Vec&)> make_gbar(const Bonus& bonus,
                                            const GbarConstants& c, int m,
                                            double big_d) {
  if (!(c.c_bar_max > 0.0)) {
    throw ConfigError("the near-optimal threshold needs c_bar_max > 0");
  }
  return [&bonus, c, m, big_d](const Vec& x) {
    const double nx = x.norm();
    const double y = nx + big_d;
    const double ratio = c.c_hat_max / c.c_bar_max;
    const double g3 = 2.0 * ratio + 2.0 * ratio * bonus.g2(y) +
                      c.c_max * (1.0 + 2.0 * std::pow(y + big_d, m));
    return 2.0 * g3 +
           3.0 * c.c_bar_max * (1.0 + 2.0 * std::pow(nx + 2.0 * big_d, m)) +
           2.0 * c.c_tilde_max / big_d * (1.0 + std::pow(nx + big_d, m + 1.0));
  };
}

OptimismReport optimism_check(const Environment& env, const DpSolution& dp,
                              const std::vector<PartitionTree>& trees,
                              const EpisodeTrace& trace) {
  OptimismReport rep;
  const Quadrature quad = make_quadrature(env.spec().d_s, dp.grid_cfg.gh_order);
  for (const auto& rec : trace.steps) {
    if (rec.block_id == kOutside) continue;
    const Block& b = trees.at(rec.h - 1).block(rec.block_id);
    const double q = bellman(env, dp.grid, dp.v.at(rec.h + 1), quad, rec.h,
                             b.state_center(), b.action_center());
    ++rep.checked;
    if (rec.q_after >= q) ++rep.optimistic;
  }
  return rep;
}

}  // namespace apl
