// Copyright 2026 The gplfd Authors
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

#include "gplfd/admittance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gplfd/error.hpp"
#include "gplfd/policy.hpp"

namespace gplfd {

void ControllerParams::Validate() const {
  if (!(mass > 0.0) || !(damping_ratio > 0.0) || !(stiffness_min > 0.0) ||
      !(stiffness_max >= stiffness_min) || !(alpha > 0.0) ||
      !std::isfinite(beta) || !std::isfinite(stiffness_max)) {
    throw Error(ErrorCode::kInvalidInput,
                "controller parameters need m > 0, delta > 0, "
                "0 < k_min <= k_max and alpha > 0");
  }
}

double stiffness_profile(double sigma, const ControllerParams& p) {
  const double range = p.stiffness_max - p.stiffness_min;
  return p.stiffness_max - range / (1.0 + std::exp(-p.alpha * (sigma - p.beta)));
}

double stiffness_rate(double sigma, double sigma_rate, const ControllerParams& p) {
  const double range = p.stiffness_max - p.stiffness_min;
  if (range == 0.0) return 0.0;
  const double excess = stiffness_profile(sigma, p) - p.stiffness_min;
  return -p.alpha * excess * (1.0 - excess / range) * sigma_rate;
}

double damping_from_ratio(double stiffness, const ControllerParams& p) {
  return 2.0 * p.damping_ratio * std::sqrt(p.mass * stiffness);
}

double stiffness_rate_bound(const ControllerParams& p, double sigma_rate) {
  return 0.25 * p.alpha * (p.stiffness_max - p.stiffness_min) * sigma_rate;
}

StabilityReport check_stability(const ControllerParams& p, double sigma_rate_max) {
  StabilityReport report;
  report.gamma = 2.0 * p.damping_ratio * std::sqrt(p.stiffness_min / p.mass);
  const double range = p.stiffness_max - p.stiffness_min;
  const double denom = p.alpha * range *
                       (1.0 + 4.0 * p.damping_ratio * p.damping_ratio) *
                       std::sqrt(p.mass);
  const double numer =
      16.0 * p.damping_ratio * std::sqrt(p.stiffness_min * p.stiffness_min *
                                         p.stiffness_min);
  report.sigma_rate_bound =
      denom > 0.0 ? numer / denom : std::numeric_limits<double>::infinity();
  report.observed_max_sigma_rate = sigma_rate_max;
  report.satisfied = sigma_rate_max < report.sigma_rate_bound;
  return report;
}

SpringToTruth::SpringToTruth(Trajectory truth, double gain, double horizon)
    : truth_(normalize_time(truth)), gain_(gain), horizon_(horizon) {
  if (!(horizon > 0.0) || !std::isfinite(gain)) {
    throw Error(ErrorCode::kInvalidInput, "invalid spring force parameters");
  }
}

Vector6d SpringToTruth::Force(const SimState& state) const {
  const double s = std::clamp(state.t / horizon_, 0.0, 1.0);
  const Vector6d target = resample(truth_, {s}).poses.front().ToVector();
  const Vector6d actual = state.setpoint - state.error;
  return gain_ * (target - actual);
}

void SetpointSource::Sample(const std::vector<double>& t,
                            std::vector<Vector6d>& setpoint,
                            std::vector<Vector6d>& sigma) const {
  setpoint.resize(t.size());
  sigma.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    setpoint[i] = Setpoint(t[i]);
    sigma[i] = Sigma(t[i]);
  }
}

PolicySetpoint::PolicySetpoint(const TaskPolicy& policy, double horizon,
                               bool shared_sigma)
    : policy_(&policy), horizon_(horizon), shared_sigma_(shared_sigma) {
  if (!(horizon > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "horizon must be positive");
  }
}

Vector6d PolicySetpoint::Setpoint(double t) const {
  return policy_->Query({t / horizon_}).front().mean;
}

Vector6d PolicySetpoint::Sigma(double t) const {
  std::vector<Vector6d> sp, sg;
  Sample({t}, sp, sg);
  return sg.front();
}

void PolicySetpoint::Sample(const std::vector<double>& t,
                            std::vector<Vector6d>& setpoint,
                            std::vector<Vector6d>& sigma) const {
  std::vector<double> s(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) s[i] = t[i] / horizon_;
  const std::vector<PoseDistribution> q = policy_->Query(s);
  setpoint.resize(t.size());
  sigma.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    setpoint[i] = q[i].mean;
    sigma[i] = q[i].var.cwiseMax(0.0).cwiseSqrt();
    if (shared_sigma_) sigma[i].setConstant(sigma[i].maxCoeff());
  }
}

SimTrace simulate(const SetpointSource& source, const ForceModel& env,
                  const ControllerParams& p, const SimConfig& config) {
  p.Validate();
  if (!(config.dt > 0.0) || !(config.horizon >= config.dt) ||
      !std::isfinite(config.horizon)) {
    throw Error(ErrorCode::kInvalidInput, "simulation needs dt > 0 and horizon >= dt");
  }
  const auto steps = static_cast<std::size_t>(std::llround(config.horizon / config.dt));
  const double dt = config.dt;

  // Setpoint and sigma on a half-step grid; even entries are the samples.
  std::vector<double> half(2 * steps + 1);
  for (std::size_t h = 0; h < half.size(); ++h) {
    half[h] = 0.5 * dt * static_cast<double>(h);
  }
  std::vector<Vector6d> setpoint, sigma;
  source.Sample(half, setpoint, sigma);

  auto stiffness_at = [&](std::size_t h) {
    Vector6d k;
    for (int a = 0; a < 6; ++a) k[a] = stiffness_profile(sigma[h][a], p);
    return k;
  };
  auto damping_of = [&](const Vector6d& k) {
    Vector6d d;
    for (int a = 0; a < 6; ++a) d[a] = damping_from_ratio(k[a], p);
    return d;
  };

  const std::size_t n = steps + 1;
  SimTrace trace;
  trace.time.resize(n);
  trace.error.resize(static_cast<Eigen::Index>(n), 6);
  trace.error_rate.resize(static_cast<Eigen::Index>(n), 6);
  trace.stiffness.resize(static_cast<Eigen::Index>(n), 6);
  trace.damping.resize(static_cast<Eigen::Index>(n), 6);
  trace.force.resize(static_cast<Eigen::Index>(n), 6);
  trace.sigma.resize(static_cast<Eigen::Index>(n), 6);
  trace.sigma_rate.resize(static_cast<Eigen::Index>(n), 6);
  trace.energy.resize(n);

  for (std::size_t k = 0; k < n; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    trace.time[k] = dt * static_cast<double>(k);
    trace.sigma.row(row) = sigma[2 * k].transpose();
    const Vector6d kp = stiffness_at(2 * k);
    trace.stiffness.row(row) = kp.transpose();
    trace.damping.row(row) = damping_of(kp).transpose();
  }
  double max_rate = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == n ? k : k + 1;
    const Vector6d rate = (sigma[2 * hi] - sigma[2 * lo]) /
                          (dt * static_cast<double>(hi - lo));
    trace.sigma_rate.row(static_cast<Eigen::Index>(k)) = rate.transpose();
    max_rate = std::max(max_rate, rate.maxCoeff());
  }

  SimState state;
  state.error = config.initial_error;
  state.error_rate = config.initial_error_rate;

  auto accel = [&](const SimState& s, const Vector6d& kp, const Vector6d& d,
                   Vector6d* f_out) {
    const Vector6d f = env.Force(s);
    if (f_out != nullptr) *f_out = f;
    return ((f.array() - d.array() * s.error_rate.array() -
             kp.array() * s.error.array()) /
            p.mass)
        .matrix()
        .eval();
  };

  for (std::size_t k = 0; k < n; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    state.t = trace.time[k];
    state.setpoint = setpoint[2 * k];
    const Vector6d kp = trace.stiffness.row(row).transpose();
    const Vector6d d = trace.damping.row(row).transpose();
    Vector6d f;
    const Vector6d a0 = accel(state, kp, d, &f);

    trace.error.row(row) = state.error.transpose();
    trace.error_rate.row(row) = state.error_rate.transpose();
    trace.force.row(row) = f.transpose();
    trace.energy[k] = (0.5 * p.mass * state.error_rate.array().square() +
                       0.5 * kp.array() * state.error.array().square())
                          .sum();
    if (!state.error.allFinite() || !state.error_rate.allFinite() ||
        !std::isfinite(trace.energy[k])) {
      throw DivergenceError(k, "simulation state became non-finite");
    }
    if (k + 1 == n) break;

    if (config.integrator == Integrator::kSemiImplicitEuler) {
      state.error_rate += dt * a0;
      state.error += dt * state.error_rate;
    } else {
      const Vector6d kp_mid = stiffness_at(2 * k + 1);
      const Vector6d d_mid = damping_of(kp_mid);
      const Vector6d kp_end = stiffness_at(2 * k + 2);
      const Vector6d d_end = damping_of(kp_end);
      const SimState s0 = state;
      auto stage = [&](double frac, const Vector6d& de, const Vector6d& dv,
                       std::size_t h) {
        SimState s = s0;
        s.t = s0.t + frac * dt;
        s.error = s0.error + de;
        s.error_rate = s0.error_rate + dv;
        s.setpoint = setpoint[h];
        return s;
      };
      const Vector6d v1 = s0.error_rate;
      const Vector6d a1 = a0;
      const SimState s2 = stage(0.5, 0.5 * dt * v1, 0.5 * dt * a1, 2 * k + 1);
      const Vector6d v2 = s2.error_rate;
      const Vector6d a2 = accel(s2, kp_mid, d_mid, nullptr);
      const SimState s3 = stage(0.5, 0.5 * dt * v2, 0.5 * dt * a2, 2 * k + 1);
      const Vector6d v3 = s3.error_rate;
      const Vector6d a3 = accel(s3, kp_mid, d_mid, nullptr);
      const SimState s4 = stage(1.0, dt * v3, dt * a3, 2 * k + 2);
      const Vector6d v4 = s4.error_rate;
      const Vector6d a4 = accel(s4, kp_end, d_end, nullptr);
      state.error = s0.error + dt / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
      state.error_rate = s0.error_rate + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    }
  }

  trace.stability = check_stability(p, std::max(max_rate, 0.0));
  trace.stability.observed_max_sigma_rate = max_rate;
  trace.stability.satisfied = max_rate < trace.stability.sigma_rate_bound;
  return trace;
}

}  // namespace gplfd
