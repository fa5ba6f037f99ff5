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

#include "apl/bonus.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace apl {

double gamma_half_integer(int m) {
  // (2m)! / (4^m m!) = prod_{i=1..m} (2i - 1) / 2
  double out = std::sqrt(std::numbers::pi);
  for (int i = 1; i <= m; ++i) out *= (2.0 * i - 1.0) / 2.0;
  return out;
}

double c_tilde_moment(int m, int d_s) {
  return std::pow(double(d_s), 0.75 * m + 1.0) *
         std::pow(2.0, (3.0 * m - 1.0) / 2.0) *
         std::sqrt(gamma_half_integer(m)) / std::pow(std::numbers::pi, 0.25);
}

Bonus::Bonus(const EnvSpec& spec, BonusConfig cfg, double big_d)
    : cfg_(cfg),
      d_s_(spec.d_s),
      horizon_(spec.horizon),
      dt_(spec.dt),
      a_bar_(spec.action_radius()),
      big_d_(big_d),
      lambda_(cfg.lambda >= 0.0 ? cfg.lambda : spec.reg.lambda),
      reg_(spec.reg) {
  if (!(cfg_.delta > 0.0 && cfg_.delta <= 1.0)) {
    throw ConfigError("bonus.delta must lie in (0, 1]");
  }
  if (cfg_.k_total < 1) throw ConfigError("bonus.k_total must be >= 1");
  if (cfg_.mode == BonusMode::kPractical) {
    if (!(cfg_.conf_scale >= 0.0) || !(cfg_.bias_scale >= 0.0)) {
      throw ConfigError("practical bonus scales must be nonnegative");
    }
    if (cfg_.ucb_scale < 0.0) cfg_.ucb_scale = cfg_.conf_scale;
    return;
  }
  if (!(cfg_.d1 > 0.0) || !(cfg_.d2 > 1.0) || !(cfg_.d3 > 0.0)) {
    throw ConfigError("bonus constants need d1 > 0, d2 > 1, d3 > 0");
  }
  if (!(cfg_.c_bar_max > 0.0)) {
    throw ConfigError("theoretical mode requires bonus.c_bar_max > 0");
  }
  if (!(lambda_ > 0.0)) {
    throw ConfigError("theoretical mode requires lambda > 0");
  }
  const double k = double(cfg_.k_total);
  if (!(cfg_.d2 * horizon_ * k * k / cfg_.delta > 1.0)) {
    throw ConfigError("log(d2 H K^2 / delta) must be positive");
  }
  if (!(cfg_.d2 / d_s_ > 1.0)) {
    std::ostringstream msg;
    msg << "log(d2/d_s) = log(" << cfg_.d2 << "/" << d_s_
        << ") <= 0; the term is clamped to zero";
    warnings_.push_back(msg.str());
  }
}

double Bonus::log_hk() const {
  const double k = double(cfg_.k_total);
  return std::log(horizon_ * k * k / cfg_.delta);
}

double Bonus::eta(double y) const {
  const double l = reg_.lipschitz();
  return reg_.l0 + l * (y + a_bar_) + 2.0 * l * big_d_;
}

double Bonus::kappa_mu_scaled(double y) const {
  return eta(y) / std::sqrt(dt_) *
         (std::sqrt(double(d_s_)) + std::sqrt(2.0 * log_hk()));
}

double Bonus::kappa_mu(double y, long n) const {
  if (n < 1) throw LogicError("kappa_mu queried with n = 0");
  const double nn = double(n);
  return eta(y) / std::sqrt(dt_) *
         (std::sqrt(d_s_ / nn) + std::sqrt(2.0 * log_hk() / nn));
}

double Bonus::kappa_sigma_scaled(double y) const {
  const double d = double(d_s_);
  const double e = eta(y);
  const double k = double(cfg_.k_total);
  const double small_log = std::max(0.0, std::log(cfg_.d2 / d));
  const double big_log = std::log(cfg_.d2 * horizon_ * k * k / cfg_.delta);
  return e * e *
         (cfg_.d1 * (std::sqrt(d) + d) + std::sqrt(small_log / cfg_.d3) +
          big_log / cfg_.d3);
}

double Bonus::kappa_sigma(double y, long n) const {
  if (n < 1) throw LogicError("kappa_sigma queried with n = 0");
  const double nn = double(n);
  const double d = double(d_s_);
  const double e = eta(y);
  const double k = double(cfg_.k_total);
  const double small_log = std::max(0.0, std::log(cfg_.d2 / d));
  const double big_log = std::log(cfg_.d2 * horizon_ * k * k / cfg_.delta);
  return e * e *
         (cfg_.d1 * (std::sqrt(d / nn) + d / std::sqrt(nn)) +
          (std::sqrt(small_log / (cfg_.d3 * nn)) +
           big_log / (cfg_.d3 * std::sqrt(nn))));
}

namespace {

double l_v_formula(double c_bar_max, int m, int d_s, double dt, double eta,
                   double l, double big_d, double km, double ks) {
  const double mm = double(m);
  const double term =
      std::pow(2.0, mm) * (std::pow(km, mm) + std::pow(eta, mm)) *
          std::pow(dt, mm) +
      std::pow(3.0, mm / 2.0) *
          (std::pow(km, mm) * std::pow(dt, mm / 2.0) + std::pow(ks, mm / 2.0) +
           std::pow(eta * eta + l * l * big_d * big_d * dt, mm / 2.0)) *
          std::pow(dt, mm / 2.0) +
      std::pow(eta, mm) * std::pow(dt, mm) +
      std::pow(eta, mm) * std::pow(dt, mm / 2.0);
  return std::sqrt(3.0) * c_bar_max * (1.0 + c_tilde_moment(m, d_s) * term);
}

}  // namespace

double Bonus::l_v_at(double y, long n) const {
  const double root = std::sqrt(double(n));
  return l_v_formula(cfg_.c_bar_max, reg_.m, d_s_, dt_, eta(y),
                     reg_.lipschitz(), big_d_, root * kappa_mu(y, n),
                     root * kappa_sigma(y, n));
}

double Bonus::l_v(double y) const {
  return l_v_formula(cfg_.c_bar_max, reg_.m, d_s_, dt_, eta(y),
                     reg_.lipschitz(), big_d_, kappa_mu_scaled(y),
                     kappa_sigma_scaled(y));
}

double Bonus::t_ucb(double y, long n, int h) const {
  if (h >= horizon_) return 0.0;
  const double km = kappa_mu(y, n);
  const double sl = std::sqrt(lambda_);
  return l_v(y) * (km * dt_ + std::pow(dt_, 1.5) / sl * km * km +
                   std::sqrt(double(d_s_)) * std::sqrt(dt_) / sl *
                       kappa_sigma(y, n));
}

double Bonus::r_ucb(long n) const {
  if (n < 1) throw LogicError("r_ucb queried with n = 0");
  const double k = double(cfg_.k_total);
  return std::sqrt(std::log(2.0 * horizon_ * k * k / cfg_.delta) * reg_.theta /
                   double(n));
}

double Bonus::g1_at(double y, long n) const {
  const double nn = double(n);
  const double root = std::sqrt(nn);
  const double km = kappa_mu(y, n);
  const double sl = std::sqrt(lambda_);
  const double k = double(cfg_.k_total);
  return root *
         (l_v_at(y, n) * (km * dt_ + root * std::pow(dt_, 1.5) / sl * km * km +
                          std::sqrt(double(d_s_)) * std::sqrt(dt_) / sl *
                              kappa_sigma(y, n)) +
          std::sqrt(std::log(2.0 * horizon_ * k * k / cfg_.delta) *
                    reg_.theta / nn));
}

double Bonus::g1(double y) const {
  const double km = kappa_mu_scaled(y);
  const double ks = kappa_sigma_scaled(y);
  const double sl = std::sqrt(lambda_);
  const double k = double(cfg_.k_total);
  return l_v(y) * (km * dt_ + km * km * std::pow(dt_, 1.5) / sl +
                   std::sqrt(double(d_s_)) * std::sqrt(dt_) / sl * ks) +
         std::sqrt(std::log(2.0 * horizon_ * k * k / cfg_.delta) * reg_.theta);
}

double Bonus::conf(double y, long n) const {
  if (n < 1) throw LogicError("conf queried with n = 0");
  const double root = std::sqrt(double(n));
  if (cfg_.mode == BonusMode::kPractical) return cfg_.conf_scale / root;
  return g1(y) / root;
}

double Bonus::l_m(double y) const {
  return 4.0 * reg_.lipschitz() *
         (1.0 + 2.0 * std::pow(y + big_d_, double(reg_.m)));
}

double Bonus::r_bias(double y, double diam) const {
  return 4.0 * l_m(y) * diam;
}

double Bonus::t_bias(double y, double diam) const {
  const double l = reg_.lipschitz();
  const double sl = std::sqrt(lambda_);
  const double d32 = std::pow(dt_, 1.5);
  return (8.0 * l * dt_ + 16.0 * l * eta(y) * std::sqrt(dt_) / sl +
          32.0 * l * l * big_d_ * d32 / sl + 128.0 * l * l * big_d_ * d32 / sl) *
         diam;
}

double Bonus::g2(double y) const {
  return 4.0 * l_m(y) + l_v(y) * t_bias(y, 1.0);
}

double Bonus::bias(double y, double diam) const {
  return r_bias(y, diam) + l_v(y) * t_bias(y, diam);
}

double Bonus::uncertainty(double y, long n, int h) const {
  if (cfg_.mode == BonusMode::kPractical) {
    return cfg_.ucb_scale / std::sqrt(double(n));
  }
  return r_ucb(n) + t_ucb(y, n, h);
}

double Bonus::discretization_bias(double y, double diam, int h) const {
  if (cfg_.mode == BonusMode::kPractical) return cfg_.bias_scale * diam;
  if (h >= horizon_) return r_bias(y, diam);
  return bias(y, diam);
}

}  // namespace apl
