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
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gplfd/error.hpp"
#include "gplfd/gp.hpp"

namespace gplfd {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Dense {
  VectorXd mean, var;
  double lml;
};

// Explicit-inverse evaluation over the uncollapsed points.
Dense DenseOracle(const VectorXd& t, const VectorXd& y, const VectorXd& r,
                  const KernelParams& p, double jitter, const VectorXd& tq, double m0 = 0.0) {
  const Eigen::Index n = t.size();
  MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) K(i, j) = rbf_kernel(t[i], t[j], p);
  MatrixXd Ky = K;
  Ky.diagonal() += r + VectorXd::Constant(n, jitter);
  const MatrixXd inv = Ky.inverse();
  MatrixXd Ks(tq.size(), n);
  for (Eigen::Index i = 0; i < tq.size(); ++i)
    for (Eigen::Index j = 0; j < n; ++j) Ks(i, j) = rbf_kernel(tq[i], t[j], p);
  const VectorXd yc = y.array() - m0;
  Dense d;
  d.mean = (Ks * inv * yc).array() + m0;
  d.var.resize(tq.size());
  for (Eigen::Index i = 0; i < tq.size(); ++i) {
    d.var[i] = rbf_kernel(tq[i], tq[i], p) - Ks.row(i) * inv * Ks.row(i).transpose();
  }
  d.lml = -0.5 * yc.dot(inv * yc) - 0.5 * std::log(Ky.determinant()) -
          0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
  return d;
}

double RelErr(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

TEST(Kernel, KnownValues) {
  const KernelParams p{0.3, 1.0};
  EXPECT_EQ(rbf_kernel(1.7, 1.7, p), 1.0);
  EXPECT_NEAR(rbf_kernel(0.0, 0.3, p), std::exp(-0.5), 1e-15);
  EXPECT_EQ(rbf_kernel(0.0, 1e6, p), 0.0);
  EXPECT_EQ(rbf_kernel(0.2, 0.9, p), rbf_kernel(0.9, 0.2, p));
  EXPECT_NEAR(rbf_kernel(0.2, 0.9, p), rbf_kernel(1.2, 1.9, p), 1e-15);
}

TEST(Kernel, InvalidParams) {
  EXPECT_THROW(KernelParams({0.0, 1.0}).Validate(), Error);
  EXPECT_THROW(KernelParams({1.0, -1.0}).Validate(), Error);
}

TEST(Fit, SinglePointInterpolates) {
  const GPModel m = GPModel::Fit({VectorXd::Constant(1, 0.0), VectorXd::Constant(1, 2.0)},
                                 {1.0, 1.0}, Noise::Constant(0.0));
  const auto pred = m.Predict(VectorXd::Constant(1, 0.0));
  EXPECT_NEAR(pred.mean[0], 2.0, 1e-9);
  EXPECT_NEAR(pred.var[0], 0.0, 1e-9);
}

TEST(Fit, TwoPointDenseSolve) {
  VectorXd t(2), y(2);
  t << 0, 1;
  y << 0, 1;
  const KernelParams p{1.0, 1.0};
  const GPModel m = GPModel::Fit({t, y}, p, Noise::Constant(0.1));
  const VectorXd tq = VectorXd::Constant(1, 0.5);
  const auto pred = m.Predict(tq);
  const Dense d = DenseOracle(t, y, VectorXd::Constant(2, 0.1), p, m.jitter(), tq);
  EXPECT_NEAR(pred.mean[0], d.mean[0], 1e-10);
  EXPECT_NEAR(pred.var[0], d.var[0], 1e-10);
  EXPECT_NEAR(m.LogMarginalLikelihood(), d.lml, 1e-10);
}

TEST(Fit, DuplicateTimesWithoutNoiseRejected) {
  VectorXd t(3), y(3);
  t << 0, 0.5, 0.5;
  y << 1, 2, 3;
  try {
    GPModel::Fit({t, y}, {1.0, 1.0}, Noise::PerPoint(VectorXd::Zero(3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumericalConditioning);
  }
}

TEST(Fit, InvalidInputs) {
  VectorXd t(2), y(2);
  t << 0, 1;
  y << 0, std::nan("");
  EXPECT_THROW(GPModel::Fit({t, y}, {1.0, 1.0}, Noise::Constant(0.1)), Error);
  y << 0, 1;
  EXPECT_THROW(GPModel::Fit({t, y}, {1.0, 1.0}, Noise::Constant(-0.1)), Error);
}

TEST(Predict, UnfittedIsStateError) {
  try {
    GPModel().Predict(VectorXd::Zero(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kState);
  }
}

TEST(Predict, PriorRecoveryFarFromData) {
  VectorXd t(3), y(3);
  t << 0, 0.1, 0.2;
  y << 1, -1, 2;
  const GPModel m = GPModel::Fit({t, y}, {0.05, 1.5}, Noise::Constant(0.01));
  const auto pred = m.Predict(VectorXd::Constant(1, 50.0));
  EXPECT_NEAR(pred.mean[0], 0.0, 1e-12);
  EXPECT_NEAR(pred.var[0], 2.25, 1e-12);
}

TEST(Predict, ExtraNoiseAddsExactly) {
  VectorXd t(4), y(4);
  t << 0, 0.3, 0.6, 0.9;
  y << 0, 1, 0, -1;
  const GPModel m = GPModel::Fit({t, y}, {0.3, 1.0}, Noise::Constant(0.05));
  VectorXd tq(2);
  tq << 0.45, 2.0;
  const VectorXd extra = VectorXd::Constant(2, 0.2);
  const auto a = m.Predict(tq);
  const auto b = m.Predict(tq, &extra);
  for (int i = 0; i < 2; ++i) EXPECT_DOUBLE_EQ(b.var[i] - a.var[i], 0.2);
}

TEST(Predict, InterpolatesWithoutNoise) {
  VectorXd t(5), y(5);
  t << 0, 0.25, 0.5, 0.75, 1.0;
  y << 0.3, -0.2, 0.8, 0.1, -0.5;
  const GPModel m = GPModel::Fit({t, y}, {0.2, 1.0}, Noise::Constant(0.0));
  const auto pred = m.Predict(t);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(pred.mean[i], y[i], 1e-6);
}

TEST(Predict, RandomInstancesMatchDenseOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 8);
  for (int inst = 0; inst < 200; ++inst) {
    const int n = size(rng);
    VectorXd t(n), y(n), r(n);
    for (int i = 0; i < n; ++i) {
      t[i] = u(rng);
      y[i] = 2.0 * u(rng) - 1.0;
      r[i] = 0.01 + 0.2 * u(rng);
    }
    if (n > 2) t[1] = t[0];  // a duplicate stamp with its own noise
    const KernelParams p{0.05 + u(rng), 0.5 + u(rng)};
    const double m0 = u(rng) - 0.5;
    const GPModel m = GPModel::Fit({t, y}, p, Noise::PerPoint(r), m0);
    VectorXd tq(5);
    for (int i = 0; i < 5; ++i) tq[i] = 1.2 * u(rng) - 0.1;
    const auto pred = m.Predict(tq);
    const Dense d = DenseOracle(t, y, r, p, m.jitter(), tq, m0);
    for (int i = 0; i < 5; ++i) {
      EXPECT_LE(RelErr(pred.mean[i], d.mean[i]), 1e-8);
      EXPECT_LE(RelErr(pred.var[i], d.var[i]), 1e-8);
    }
    EXPECT_LE(RelErr(m.LogMarginalLikelihood(), d.lml), 1e-8);
  }
}

TEST(Predict, CollapsedGramReassembles) {
  VectorXd t(5), y(5);
  t << 0, 0.2, 0.2, 0.2, 0.7;
  y << 1, 2, 3, 4, 5;
  const GPModel m = GPModel::Fit({t, y}, {0.3, 1.0}, Noise::Constant(0.1));
  EXPECT_LE((m.GramMatrix() - m.ReconstructedGramMatrix()).norm(), 1e-12);
}

TEST(Predict, VarianceBoundedByPriorAndMonotoneInData) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const KernelParams p{0.2, 1.3};
  VectorXd tq(20);
  for (int i = 0; i < 20; ++i) tq[i] = u(rng);
  for (int inst = 0; inst < 30; ++inst) {
    VectorXd t(6), y(6);
    for (int i = 0; i < 6; ++i) {
      t[i] = u(rng);
      y[i] = u(rng);
    }
    const auto big = GPModel::Fit({t, y}, p, Noise::Constant(0.02)).Predict(tq);
    const auto small =
        GPModel::Fit({t.head(5), y.head(5)}, p, Noise::Constant(0.02)).Predict(tq);
    for (int i = 0; i < 20; ++i) {
      EXPECT_LE(big.var[i], p.signal_std * p.signal_std + 1e-12);
      EXPECT_LE(big.var[i], small.var[i] + 1e-12);
    }
  }
}

TEST(Likelihood, ClosedForms) {
  const GPModel one = GPModel::Fit({VectorXd::Zero(1), VectorXd::Zero(1)}, {1.0, 1.0},
                                   Noise::Constant(0.0));
  EXPECT_NEAR(one.LogMarginalLikelihood(), -0.5 * std::log(2.0 * M_PI), 1e-9);
  VectorXd t(3);
  t << 0, 0.4, 0.9;
  const GPModel zero = GPModel::Fit({t, VectorXd::Zero(3)}, {0.5, 1.0}, Noise::Constant(0.1));
  const Dense d = DenseOracle(t, VectorXd::Zero(3), VectorXd::Constant(3, 0.1), {0.5, 1.0},
                              zero.jitter(), t);
  EXPECT_NEAR(zero.LogMarginalLikelihood(), d.lml, 1e-12);
}

TEST(Likelihood, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  for (int inst = 0; inst < 50; ++inst) {
    const int n = 3 + static_cast<int>(u(rng) * 10);
    VectorXd t(n), y(n);
    for (int i = 0; i < n; ++i) {
      t[i] = u(rng);
      y[i] = std::sin(6.0 * t[i]) + 0.1 * u(rng);
    }
    const double ll = std::log(0.1 + u(rng)), lf = std::log(0.5 + u(rng)),
                 ln = std::log(0.05 + 0.2 * u(rng));
    auto lml = [&](double a, double b, double c) {
      return GPModel::Fit({t, y}, {std::exp(a), std::exp(b)}, Noise::Constant(std::exp(2 * c)))
          .LogMarginalLikelihood();
    };
    const Eigen::Vector3d g =
        GPModel::Fit({t, y}, {std::exp(ll), std::exp(lf)}, Noise::Constant(std::exp(2 * ln)))
            .LogMarginalLikelihoodGradient();
    const Eigen::Vector3d fd((lml(ll + h, lf, ln) - lml(ll - h, lf, ln)) / (2 * h),
                             (lml(ll, lf + h, ln) - lml(ll, lf - h, ln)) / (2 * h),
                             (lml(ll, lf, ln + h) - lml(ll, lf, ln - h)) / (2 * h));
    for (int k = 0; k < 3; ++k) {
      EXPECT_LE(std::abs(g[k] - fd[k]) / std::max(1.0, std::abs(fd[k])), 1e-4)
          << "instance " << inst << " component " << k;
    }
  }
}

TEST(Optimize, RecoversLengthScale) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  const int N = 200;
  VectorXd t(N);
  for (int i = 0; i < N; ++i) t[i] = u(rng);
  const KernelParams truth{0.2, 1.0};
  MatrixXd K(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) K(i, j) = rbf_kernel(t[i], t[j], truth);
  K.diagonal().array() += 1e-8;
  const MatrixXd L = K.llt().matrixL();
  VectorXd z(N), e(N);
  for (int i = 0; i < N; ++i) {
    z[i] = n(rng);
    e[i] = 0.05 * n(rng);
  }
  const VectorXd y = L * z + e;
  OptConfig cfg;
  cfg.seed = 4;
  const auto res = optimize_hyperparameters({t, y}, Noise::Constant(0.01), cfg);
  EXPECT_GT(res.kernel.length_scale, 0.1);
  EXPECT_LT(res.kernel.length_scale, 0.4);
  EXPECT_NEAR(std::sqrt(res.noise_variance), 0.05, 0.02);
  const double at_truth =
      GPModel::Fit({t, y}, truth, Noise::Constant(0.0025)).LogMarginalLikelihood();
  EXPECT_GE(res.log_marginal_likelihood, at_truth - 1e-6);
}

TEST(Optimize, ConstantDataShrinksSignal) {
  VectorXd t(20), y(20);
  for (int i = 0; i < 20; ++i) {
    t[i] = i / 19.0;
    y[i] = 3.0 + ((i % 2) ? 1e-3 : -1e-3);
  }
  OptConfig cfg;
  const auto res = optimize_hyperparameters({t, y}, Noise::Constant(1e-6), cfg, 3.0);
  EXPECT_LT(res.kernel.signal_std, 1e-2);
}

TEST(Optimize, NeedsTwoPoints) {
  EXPECT_THROW(optimize_hyperparameters({VectorXd::Zero(1), VectorXd::Zero(1)},
                                        Noise::Constant(0.1), OptConfig{}),
               Error);
}

TrainingSet HeteroData(double (*sigma)(double), std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  const int grid = 50, reps = 6;
  TrainingSet s;
  s.t.resize(grid * reps);
  s.y.resize(grid * reps);
  for (int r = 0; r < reps; ++r) {
    for (int i = 0; i < grid; ++i) {
      const double t = i / (grid - 1.0);
      s.t[r * grid + i] = t;
      s.y[r * grid + i] = std::sin(2.0 * M_PI * t) + sigma(t) * n(rng);
    }
  }
  return s;
}

double BumpSigma(double t) { return 0.01 + 0.29 * std::exp(-std::pow((t - 0.5) / 0.15, 2)); }
double FlatSigma(double) { return 0.1; }

TEST(Hetero, MidspanNoiseDominatesEndpoints) {
  HeteroConfig cfg;
  const HeteroGPModel m = fit_heteroscedastic(HeteroData(BumpSigma, 41), cfg);
  VectorXd tq(3);
  tq << 0.0, 0.5, 1.0;
  const VectorXd r = m.NoiseVariance(tq);
  EXPECT_GE(r[1] / std::max(r[0], r[2]), 5.0);
  EXPECT_FALSE(m.degenerate_noise);
}

TEST(Hetero, ConstantNoiseStaysFlat) {
  HeteroConfig cfg;
  const HeteroGPModel m = fit_heteroscedastic(HeteroData(FlatSigma, 43), cfg);
  VectorXd tq(101);
  for (int i = 0; i <= 100; ++i) tq[i] = i / 100.0;
  const VectorXd r = m.NoiseVariance(tq);
  EXPECT_LT(r.maxCoeff() / r.minCoeff(), 3.0);
}

TEST(Hetero, RepeatedDemoHitsFloor) {
  TrainingSet s;
  s.t.resize(60);
  s.y.resize(60);
  for (int r = 0; r < 3; ++r)
    for (int i = 0; i < 20; ++i) {
      s.t[r * 20 + i] = i / 19.0;
      s.y[r * 20 + i] = std::cos(3.0 * i / 19.0);
    }
  HeteroConfig cfg;
  const HeteroGPModel m = fit_heteroscedastic(s, cfg);
  EXPECT_TRUE(m.degenerate_noise);
  const VectorXd r = m.NoiseVariance(s.t.head(20));
  EXPECT_LE(r.maxCoeff(), 10.0 * cfg.noise_floor);
}

TEST(Hetero, PredictAddsNoiseTerm) {
  HeteroConfig cfg;
  const HeteroGPModel m = fit_heteroscedastic(HeteroData(BumpSigma, 47), cfg);
  VectorXd tq(3);
  tq << 0.1, 0.5, 0.8;
  const auto full = m.Predict(tq);
  const auto signal = m.signal.Predict(tq);
  const VectorXd r = m.NoiseVariance(tq);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(full.var[i] - signal.var[i], r[i], 1e-12);
}

TEST(Hetero, TooFewPoints) {
  VectorXd t(5), y(5);
  t << 0, 0.25, 0.5, 0.75, 1;
  y.setZero();
  try {
    fit_heteroscedastic({t, y}, HeteroConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
}

PosteriorPrediction Scalar(double m, double v) {
  PosteriorPrediction p;
  p.mean = VectorXd::Constant(1, m);
  p.var = VectorXd::Constant(1, v);
  return p;
}

TEST(Product, KnownValues) {
  const auto r = gaussian_product(Scalar(0, 1), Scalar(2, 1));
  EXPECT_DOUBLE_EQ(r.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(r.var[0], 0.5);
  const auto none = gaussian_product(Scalar(0.3, 0.7), Scalar(5, INFINITY));
  EXPECT_EQ(none.mean[0], 0.3);
  EXPECT_EQ(none.var[0], 0.7);
  const auto hard = gaussian_product(Scalar(0.3, 0.7), Scalar(5, 0.0));
  EXPECT_EQ(hard.mean[0], 5.0);
  EXPECT_EQ(hard.var[0], 0.0);
}

TEST(Product, InconsistentHardConstraints) {
  try {
    gaussian_product(Scalar(0, 0), Scalar(1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInconsistentConstraint);
  }
  EXPECT_NO_THROW(gaussian_product(Scalar(1, 0), Scalar(1, 0)));
}

TEST(Product, SymmetricPrecisionAddition) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int i = 0; i < 200; ++i) {
    const auto a = Scalar(u(rng) - 1.5, u(rng));
    const auto b = Scalar(u(rng) - 1.5, u(rng));
    const auto ab = gaussian_product(a, b);
    const auto ba = gaussian_product(b, a);
    EXPECT_NEAR(ab.mean[0], ba.mean[0], 1e-14);
    EXPECT_NEAR(ab.var[0], ba.var[0], 1e-14);
    EXPECT_NEAR(1.0 / ab.var[0], 1.0 / a.var[0] + 1.0 / b.var[0],
                1e-10 * (1.0 / ab.var[0]));
  }
}

TEST(Product, LengthMismatch) {
  PosteriorPrediction two;
  two.mean = VectorXd::Zero(2);
  two.var = VectorXd::Ones(2);
  EXPECT_THROW(gaussian_product(Scalar(0, 1), two), Error);
}

}  // namespace
}  // namespace gplfd
