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

#ifndef APL_BONUS_HPP_
#define APL_BONUS_HPP_

#include <string>
#include <vector>

#include "apl/env.hpp"

namespace apl {

enum class BonusMode { kTheoretical, kPractical };

struct BonusConfig {
  BonusMode mode = BonusMode::kPractical;
  // Practical mode: CONF = conf_scale / sqrt(n) drives splitting; the
  // uncertainty bonus added to Q is ucb_scale / sqrt(n) (conf_scale when
  // negative) and the discretization bias is bias_scale * diam.
  double conf_scale = 1.0;
  double ucb_scale = -1.0;
  double bias_scale = 0.0;

  double delta = 0.1;
  double d1 = 1.0;
  double d2 = 2.0;
  double d3 = 0.5;
  double c_bar_max = 0.0;
  double c_hat_max = 0.0;
  long k_total = 1;
  // Elliptic bound; the env's declared value when negative.
  double lambda = -1.0;
};

// Closed-form confidence widths and bias corrections. The argument y is the
// norm of the state center of a block's root-layer ancestor.
class Bonus {
 public:
  Bonus(const EnvSpec& spec, BonusConfig cfg, double big_d);

  const BonusConfig& config() const { return cfg_; }
  BonusMode mode() const { return cfg_.mode; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  double eta(double y) const;
  double kappa_mu(double y, long n) const;
  double kappa_sigma(double y, long n) const;
  // sqrt(n) * kappa, which does not depend on n.
  double kappa_mu_scaled(double y) const;
  double kappa_sigma_scaled(double y) const;

  // Evaluates L_V with sqrt(n) kappa formed from kappa(n); independent of n.
  double l_v_at(double y, long n) const;
  double l_v(double y) const;

  double t_ucb(double y, long n, int h) const;
  double r_ucb(long n) const;

  // Literal g1 expression at a given n, and its n-free simplification.
  double g1_at(double y, long n) const;
  double g1(double y) const;
  // Splitting confidence: g1/sqrt(n) or conf_scale/sqrt(n).
  double conf(double y, long n) const;

  double l_m(double y) const;
  double r_bias(double y, double diam) const;
  double t_bias(double y, double diam) const;
  double g2(double y) const;
  double bias(double y, double diam) const;

  // Bonus terms entering the Q update for a visited block, per mode.
  double uncertainty(double y, long n, int h) const;
  double discretization_bias(double y, double diam, int h) const;

 private:
  double log_hk() const;

  BonusConfig cfg_;
  int d_s_;
  int horizon_;
  double dt_;
  double a_bar_;
  double big_d_;
  double lambda_;
  RegularityConstants reg_;
  std::vector<std::string> warnings_;
};

// d^{3m/4+1} 2^{(3m-1)/2} Gamma(m+1/2)^{1/2} / pi^{1/4}.
double c_tilde_moment(int m, int d_s);
// Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!).
double gamma_half_integer(int m);

}  // namespace apl

#endif  // APL_BONUS_HPP_
