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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "gplfd/admittance.hpp"
#include "gplfd/error.hpp"

namespace gplfd {
namespace {

const ControllerParams kDefaults{};

// Closed-form solution of m e'' + d e' + k e = 0.
double Oscillator(double m, double d, double k, double e0, double v0, double t) {
  const double w0 = std::sqrt(k / m);
  const double zeta = d / (2.0 * std::sqrt(m * k));
  if (std::abs(zeta - 1.0) < 1e-12) {
    return (e0 + (v0 + w0 * e0) * t) * std::exp(-w0 * t);
  }
  if (zeta < 1.0) {
    const double wd = w0 * std::sqrt(1.0 - zeta * zeta);
    const double a = zeta * w0;
    return std::exp(-a * t) * (e0 * std::cos(wd * t) + (v0 + a * e0) / wd * std::sin(wd * t));
  }
  const double s = w0 * std::sqrt(zeta * zeta - 1.0);
  const double r1 = -zeta * w0 + s, r2 = -zeta * w0 - s;
  const double c2 = (v0 - r1 * e0) / (r2 - r1);
  const double c1 = e0 - c2;
  return c1 * std::exp(r1 * t) + c2 * std::exp(r2 * t);
}

FunctionSetpoint ConstantSigma(double sigma) {
  return FunctionSetpoint([](double) { return Vector6d::Zero(); },
                          [sigma](double) { return Vector6d::Constant(sigma); });
}

TEST(Stiffness, KnownValues) {
  EXPECT_DOUBLE_EQ(stiffness_profile(kDefaults.beta, kDefaults), 300.0);
  EXPECT_NEAR(stiffness_profile(1e6, kDefaults), 100.0, 1e-9);
  EXPECT_NEAR(stiffness_profile(0.0, kDefaults), 500.0 - 400.0 / (1.0 + std::exp(6.0)), 1e-12);
  EXPECT_NEAR(stiffness_profile(0.0, kDefaults), 499.01, 5e-3);
}

TEST(Stiffness, MonotoneAndBounded) {
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) {
    const double k = stiffness_profile(i * 1e-4, kDefaults);
    EXPECT_LT(k, prev);
    EXPECT_GT(k, 100.0);
    EXPECT_LT(k, 500.0);
    prev = k;
  }
}

TEST(Stiffness, RateMatchesFiniteDifferences) {
  const double h = 1e-6;
  for (int i = 0; i <= 200; ++i) {
    const double t = i * 0.01;
    auto sigma = [](double t) { return 0.01 + 0.008 * std::sin(3.0 * t); };
    const double sdot = 0.024 * std::cos(3.0 * t);
    const double fd = (stiffness_profile(sigma(t + h), kDefaults) - stiffness_profile(sigma(t - h), kDefaults)) / (2 * h);
    const double an = stiffness_rate(sigma(t), sdot, kDefaults);
    EXPECT_LE(std::abs(an - fd), 1e-4 * std::max(1.0, std::abs(fd))) << t;
    EXPECT_LE(std::abs(an), stiffness_rate_bound(kDefaults, std::abs(sdot)) + 1e-9);
  }
}

TEST(Damping, KnownValues) {
  EXPECT_DOUBLE_EQ(damping_from_ratio(100.0, kDefaults), 20.0);
  ControllerParams p;
  p.damping_ratio = 0.5;
  EXPECT_DOUBLE_EQ(damping_from_ratio(400.0, p), 20.0);
  p.damping_ratio = 0.0;
  EXPECT_EQ(damping_from_ratio(400.0, p), 0.0);
}

TEST(RateBound, KnownValues) {
  EXPECT_NEAR(stiffness_rate_bound(kDefaults, 0.01), 600.0, 1e-9);
  ControllerParams p;
  p.alpha = 0.0;
  EXPECT_EQ(stiffness_rate_bound(p, 0.01), 0.0);
  p = kDefaults;
  p.stiffness_max = p.stiffness_min;
  EXPECT_EQ(stiffness_rate_bound(p, 0.01), 0.0);
}

TEST(Stability, DefaultConstants) {
  const StabilityReport r = check_stability(kDefaults, 0.0);
  EXPECT_NEAR(r.sigma_rate_bound, 0.0133333333333, 1e-9);
  EXPECT_TRUE(r.satisfied);
  EXPECT_NEAR(r.gamma, 20.0, 1e-12);
  EXPECT_FALSE(check_stability(kDefaults, 0.02).satisfied);
}

TEST(Stability, ConstantStiffnessAlwaysSatisfied) {
  ControllerParams p;
  p.stiffness_max = p.stiffness_min;
  const StabilityReport r = check_stability(p, 1e9);
  EXPECT_TRUE(std::isinf(r.sigma_rate_bound));
  EXPECT_TRUE(r.satisfied);
}

TEST(Stability, BoundPositiveForValidParams) {
  for (double a : {1.0, 60.0, 600.0})
    for (double d : {0.1, 1.0, 3.0})
      for (double kmax : {150.0, 500.0, 5000.0}) {
        ControllerParams p;
        p.alpha = a;
        p.damping_ratio = d;
        p.stiffness_max = kmax;
        EXPECT_GT(check_stability(p, 0.0).sigma_rate_bound, 0.0);
      }
}

TEST(Params, Validation) {
  ControllerParams p;
  p.mass = 0.0;
  EXPECT_THROW(p.Validate(), Error);
  p = kDefaults;
  p.stiffness_max = 50.0;
  EXPECT_THROW(p.Validate(), Error);
}

TEST(Simulate, CriticallyDampedDecay) {
  SimConfig cfg;
  cfg.horizon = 1.0;
  cfg.initial_error[0] = 0.1;
  const SimTrace tr = simulate(ConstantSigma(0.05), ZeroForce(), kDefaults, cfg);
  const double k = tr.stiffness(0, 0);
  // Envelope decay time of (1 + w t) exp(-w t) counted as 2 / w.
  const double tau = 2.0 / std::sqrt(k);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const double n = tr.error.row(static_cast<Eigen::Index>(i)).norm();
    EXPECT_LE(n, prev + 1e-15);
    prev = n;
    if (tr.time[i] >= 5.0 * tau) EXPECT_LT(n, 1e-4) << tr.time[i];
  }
}

TEST(Simulate, MatchesClosedFormOscillator) {
  const double e0 = 0.1, v0 = -0.3;
  for (double ratio : {0.3, 1.0, 2.0}) {
    ControllerParams p;
    p.damping_ratio = ratio;
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 2.0;
    cfg.integrator = Integrator::kRungeKutta4;
    cfg.initial_error[2] = e0;
    cfg.initial_error_rate[2] = v0;
    const SimTrace tr = simulate(ConstantSigma(0.02), ZeroForce(), p, cfg);
    const double k = tr.stiffness(0, 2), d = tr.damping(0, 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      worst = std::max(worst, std::abs(tr.error(static_cast<Eigen::Index>(i), 2) -
                                       Oscillator(1.0, d, k, e0, v0, tr.time[i])));
    }
    EXPECT_LT(worst, 1e-3) << "ratio " << ratio;
    EXPECT_LT(worst, 1e-8) << "ratio " << ratio;
  }
}

TEST(Simulate, SemiImplicitEulerCloseToClosedForm) {
  ControllerParams p;
  SimConfig cfg;
  cfg.horizon = 2.0;
  cfg.initial_error[0] = 0.1;
  const SimTrace tr = simulate(ConstantSigma(0.02), ZeroForce(), p, cfg);
  const double k = tr.stiffness(0, 0), d = tr.damping(0, 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    worst = std::max(worst, std::abs(tr.error(static_cast<Eigen::Index>(i), 0) -
                                     Oscillator(1.0, d, k, 0.1, 0.0, tr.time[i])));
  }
  EXPECT_LT(worst, 5e-3);
}

TEST(Simulate, SlowSigmaRampKeepsEnergyNonIncreasing) {
  // sigma rising at 80% of the stability bound, sweeping through beta.
  const double bound = check_stability(kDefaults, 0.0).sigma_rate_bound;
  const double rate = 0.8 * bound;
  FunctionSetpoint src([](double) { return Vector6d::Zero(); },
                       [rate](double t) { return Vector6d::Constant(std::max(0.0, rate * (t - 0.2))); });
  SimConfig cfg;
  cfg.horizon = 2.0;
  cfg.initial_error << 0.1, -0.05, 0.02, 0.01, 0.0, -0.03;
  cfg.initial_error_rate << 0.2, 0.0, -0.1, 0.0, 0.05, 0.0;
  const SimTrace tr = simulate(src, ZeroForce(), kDefaults, cfg);
  EXPECT_TRUE(tr.stability.satisfied);
  EXPECT_LE(tr.stability.observed_max_sigma_rate, rate * (1 + 1e-9));
  for (std::size_t i = 1; i < tr.size(); ++i) {
    EXPECT_LE(tr.energy[i], tr.energy[i - 1] * (1 + 1e-12) + 1e-300) << i;
  }
}

TEST(Simulate, FastRampIsFlagged) {
  const double bound = check_stability(kDefaults, 0.0).sigma_rate_bound;
  const double rate = 100.0 * bound;
  FunctionSetpoint src([](double) { return Vector6d::Zero(); },
                       [rate](double t) { return Vector6d::Constant(rate * t); });
  SimConfig cfg;
  cfg.horizon = 0.5;
  cfg.initial_error[0] = 0.1;
  const SimTrace tr = simulate(src, ZeroForce(), kDefaults, cfg);
  EXPECT_FALSE(tr.stability.satisfied);
}

TEST(Simulate, StiffnessRateWithinBoundAlongTrace) {
  FunctionSetpoint src([](double) { return Vector6d::Zero(); },
                       [](double t) { return Vector6d::Constant(0.01 + 0.005 * std::sin(2.0 * t)); });
  SimConfig cfg;
  cfg.horizon = 3.0;
  const SimTrace tr = simulate(src, ZeroForce(), kDefaults, cfg);
  const double max_sdot = tr.sigma_rate.cwiseAbs().maxCoeff();
  const double bound = stiffness_rate_bound(kDefaults, max_sdot);
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double kdot = (tr.stiffness(r, 0) - tr.stiffness(r - 1, 0)) / cfg.dt;
    EXPECT_LE(std::abs(kdot), bound * 1.001 + 1e-6);
  }
}

TEST(Simulate, ConstantForceSettlesAtStaticDeflection) {
  Vector6d f = Vector6d::Zero();
  f[1] = 5.0;
  SimConfig cfg;
  cfg.horizon = 3.0;
  const SimTrace tr = simulate(ConstantSigma(1.0), ConstantForce(f), kDefaults, cfg);
  const auto last = static_cast<Eigen::Index>(tr.size() - 1);
  EXPECT_NEAR(tr.error(last, 1), 5.0 / tr.stiffness(last, 1), 1e-6);
  EXPECT_EQ(tr.force(last, 1), 5.0);
}

TEST(Simulate, DivergenceReportsStep) {
  FunctionForce boom([](const SimState& s) {
    Vector6d f = Vector6d::Zero();
    if (s.t > 0.0105) f[0] = std::numeric_limits<double>::infinity();
    return f;
  });
  SimConfig cfg;
  cfg.horizon = 0.1;
  try {
    simulate(ConstantSigma(0.0), boom, kDefaults, cfg);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
    EXPECT_EQ(e.step(), 12u);
  }
}

TEST(Simulate, InvalidConfig) {
  SimConfig cfg;
  cfg.dt = 0.0;
  EXPECT_THROW(simulate(ConstantSigma(0.0), ZeroForce(), kDefaults, cfg), Error);
  cfg.dt = 0.1;
  cfg.horizon = 0.01;
  EXPECT_THROW(simulate(ConstantSigma(0.0), ZeroForce(), kDefaults, cfg), Error);
}

TEST(Simulate, TraceShape) {
  SimConfig cfg;
  cfg.horizon = 0.05;
  const SimTrace tr = simulate(ConstantSigma(0.0), ZeroForce(), kDefaults, cfg);
  EXPECT_EQ(tr.size(), 51u);
  EXPECT_EQ(tr.error.rows(), 51);
  EXPECT_NEAR(tr.time.back(), 0.05, 1e-15);
  EXPECT_EQ(tr.energy.size(), 51u);
}

}  // namespace
}  // namespace gplfd
