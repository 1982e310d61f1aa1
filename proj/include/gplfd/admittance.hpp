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

// Uncertainty-modulated admittance: a sigmoid stiffness law driven by the
// policy standard deviation, critically scaled damping, the sufficient
// stability bound on the uncertainty rate, and fixed-step simulation of the
// per-axis error dynamics  m e'' + d(t) e' + k(t) e = f_ext(t).
//
// Conventions: e = desired - actual. The six axes share one parameter set;
// stiffness is read as N/m on translational axes and N*m/rad on rotational
// ones.

#ifndef GPLFD_ADMITTANCE_HPP_
#define GPLFD_ADMITTANCE_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "gplfd/alignment.hpp"
#include "gplfd/se3.hpp"

namespace gplfd {

class TaskPolicy;

struct ControllerParams {
  double mass = 1.0;
  double damping_ratio = 1.0;
  double stiffness_min = 100.0;
  double stiffness_max = 500.0;
  double alpha = 600.0;
  double beta = 0.01;

  void Validate() const;
};

double stiffness_profile(double sigma, const ControllerParams& p);

// d k_p / dt along sigma(t), the exact derivative of stiffness_profile.
double stiffness_rate(double sigma, double sigma_rate, const ControllerParams& p);

double damping_from_ratio(double stiffness, const ControllerParams& p);

// Worst-case |d k_p / dt| over the sigmoid for a given sigma rate.
double stiffness_rate_bound(const ControllerParams& p, double sigma_rate);

struct StabilityReport {
  double gamma = 0.0;
  double sigma_rate_bound = 0.0;
  double observed_max_sigma_rate = 0.0;
  bool satisfied = false;
};

StabilityReport check_stability(const ControllerParams& p, double sigma_rate_max);

enum class Integrator { kSemiImplicitEuler, kRungeKutta4 };

struct SimState {
  double t = 0.0;
  Vector6d error = Vector6d::Zero();
  Vector6d error_rate = Vector6d::Zero();
  Vector6d setpoint = Vector6d::Zero();
};

class ForceModel {
 public:
  virtual ~ForceModel() = default;
  virtual Vector6d Force(const SimState& state) const = 0;
};

class ZeroForce final : public ForceModel {
 public:
  Vector6d Force(const SimState&) const override { return Vector6d::Zero(); }
};

class ConstantForce final : public ForceModel {
 public:
  explicit ConstantForce(const Vector6d& f) : f_(f) {}
  Vector6d Force(const SimState&) const override { return f_; }

 private:
  Vector6d f_;
};

// Spring pulling the end effector (setpoint - error) toward a ground-truth
// trajectory given on a normalized clock.
class SpringToTruth final : public ForceModel {
 public:
  SpringToTruth(Trajectory truth, double gain, double horizon);
  Vector6d Force(const SimState& state) const override;

 private:
  Trajectory truth_;
  double gain_;
  double horizon_;
};

// Arbitrary time-dependent force, mainly for tests.
class FunctionForce final : public ForceModel {
 public:
  explicit FunctionForce(std::function<Vector6d(const SimState&)> f)
      : f_(std::move(f)) {}
  Vector6d Force(const SimState& state) const override { return f_(state); }

 private:
  std::function<Vector6d(const SimState&)> f_;
};

// Provides the setpoint and the per-axis uncertainty sigma(t) on [0, horizon].
class SetpointSource {
 public:
  virtual ~SetpointSource() = default;
  virtual Vector6d Setpoint(double t) const = 0;
  virtual Vector6d Sigma(double t) const = 0;
  // Batched evaluation; the default loops over the single-time calls.
  virtual void Sample(const std::vector<double>& t, std::vector<Vector6d>& setpoint,
                      std::vector<Vector6d>& sigma) const;
};

// Policy mean as setpoint; sigma_i = sqrt(var_i) with simulation time mapped
// onto the policy clock by t / horizon. With shared_sigma every axis uses the
// largest sigma.
class PolicySetpoint final : public SetpointSource {
 public:
  PolicySetpoint(const TaskPolicy& policy, double horizon, bool shared_sigma);
  Vector6d Setpoint(double t) const override;
  Vector6d Sigma(double t) const override;
  void Sample(const std::vector<double>& t, std::vector<Vector6d>& setpoint,
              std::vector<Vector6d>& sigma) const override;

 private:
  const TaskPolicy* policy_;
  double horizon_;
  bool shared_sigma_;
};

class FunctionSetpoint final : public SetpointSource {
 public:
  FunctionSetpoint(std::function<Vector6d(double)> setpoint,
                   std::function<Vector6d(double)> sigma)
      : setpoint_(std::move(setpoint)), sigma_(std::move(sigma)) {}
  Vector6d Setpoint(double t) const override { return setpoint_(t); }
  Vector6d Sigma(double t) const override { return sigma_(t); }

 private:
  std::function<Vector6d(double)> setpoint_;
  std::function<Vector6d(double)> sigma_;
};

struct SimConfig {
  double dt = 1e-3;
  double horizon = 10.0;
  Integrator integrator = Integrator::kSemiImplicitEuler;
  Vector6d initial_error = Vector6d::Zero();
  Vector6d initial_error_rate = Vector6d::Zero();
};

using TraceMatrix = Eigen::Matrix<double, Eigen::Dynamic, 6>;

struct SimTrace {
  std::vector<double> time;
  TraceMatrix error;
  TraceMatrix error_rate;
  TraceMatrix stiffness;
  TraceMatrix damping;
  TraceMatrix force;
  TraceMatrix sigma;
  TraceMatrix sigma_rate;
  std::vector<double> energy;  // sum over axes of m e'^2/2 + k e^2/2
  StabilityReport stability;

  std::size_t size() const { return time.size(); }
};

// Throws DivergenceError on the first non-finite state.
SimTrace simulate(const SetpointSource& source, const ForceModel& env,
                  const ControllerParams& p, const SimConfig& config);

}  // namespace gplfd

#endif  // GPLFD_ADMITTANCE_HPP_
