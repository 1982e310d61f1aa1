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

// Hyperparameter search and the two-stage heteroscedastic fit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gplfd/error.hpp"
#include "gplfd/gp.hpp"

namespace gplfd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Eigen::VectorXd Clamp(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lo).cwiseMin(hi);
  }
};

// Negative log marginal likelihood and its gradient in log-parameter space.
class Objective {
 public:
  Objective(const TrainingSet& train, const Noise& noise, bool learn_noise,
            double prior_mean)
      : train_(train), noise_(noise), learn_noise_(learn_noise),
        prior_mean_(prior_mean) {}

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    ++evaluations_;
    try {
      const KernelParams p{std::exp(x[0]), std::exp(x[1])};
      const Noise noise =
          learn_noise_ ? Noise::Constant(std::exp(2.0 * x[2])) : noise_;
      const GPModel model = GPModel::Fit(train_, p, noise, prior_mean_);
      const double lml = model.LogMarginalLikelihood();
      if (!std::isfinite(lml)) return kInf;
      if (grad != nullptr) {
        const Eigen::Vector3d g = model.LogMarginalLikelihoodGradient();
        *grad = -g.head(x.size());
        if (!grad->allFinite()) return kInf;
      }
      return -lml;
    } catch (const Error&) {
      return kInf;
    }
  }

  int evaluations() const { return evaluations_; }

 private:
  const TrainingSet& train_;
  const Noise& noise_;
  bool learn_noise_;
  double prior_mean_;
  int evaluations_ = 0;
};

Eigen::VectorXd ProjectedGradient(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& g, const Box& box) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= box.lo[i] && g[i] > 0.0) || (x[i] >= box.hi[i] && g[i] < 0.0)) {
      pg[i] = 0.0;
    }
  }
  return pg;
}

// Projected quasi-Newton descent with Armijo backtracking.
double LocalSearch(Objective& f, const Box& box, int max_iterations,
                   Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  x = box.Clamp(x);
  Eigen::VectorXd g(n);
  double fx = f(x, &g);
  if (!std::isfinite(fx)) return kInf;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);

  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd pg = ProjectedGradient(x, g, box);
    if (pg.lpNorm<Eigen::Infinity>() < 1e-7) break;
    Eigen::VectorXd d = -h * pg;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pg[i] == 0.0) d[i] = 0.0;
    }
    if (d.dot(pg) >= 0.0) {
      h.setIdentity();
      d = -pg;
    }
    const double dmax = d.lpNorm<Eigen::Infinity>();
    if (dmax > 2.0) d *= 2.0 / dmax;

    bool accepted = false;
    Eigen::VectorXd x_new(n), g_new(n);
    double f_new = kInf;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = 1.0;
      for (int ls = 0; ls < 30; ++ls) {
        x_new = box.Clamp(x + step * d);
        f_new = f(x_new, &g_new);
        if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        if (h.isIdentity()) break;
        h.setIdentity();
        d = -pg;
        const double m = d.lpNorm<Eigen::Infinity>();
        if (m > 2.0) d *= 2.0 / m;
      }
    }
    if (!accepted) break;

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      h = (id - rho * s * yv.transpose()) * h * (id - rho * yv * s.transpose()) +
          rho * s * s.transpose();
    }
    const double improvement = fx - f_new;
    x = x_new;
    g = g_new;
    fx = f_new;
    if (improvement < 1e-10 * (1.0 + std::abs(fx)) ||
        s.lpNorm<Eigen::Infinity>() < 1e-10) {
      break;
    }
  }
  return fx;
}

double StdDev(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().mean());
}

// Uniform in [0, 1) from the top 53 bits, independent of the standard
// library's distribution implementation.
double Uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

HyperparameterResult optimize_hyperparameters(const TrainingSet& train,
                                              const Noise& noise,
                                              const OptConfig& config,
                                              double prior_mean) {
  train.Validate();
  if (train.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "hyperparameter optimization needs at least 2 points");
  }
  if (config.starts < 1 || config.max_iterations < 0) {
    throw Error(ErrorCode::kInvalidInput,
                "optimizer needs >= 1 start and >= 0 iterations");
  }
  const bool learn_noise = noise.is_constant() && config.optimize_noise;

  double range = train.t.maxCoeff() - train.t.minCoeff();
  if (!(range > 0.0)) range = 1.0;
  double scale = StdDev(train.y.array() - prior_mean);
  if (!(scale > 1e-12)) scale = StdDev(train.y);
  if (!(scale > 1e-12)) scale = 1.0;

  const Eigen::Index dim = learn_noise ? 3 : 2;
  Box box{Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
  box.lo[0] = std::log(config.length_scale_min);
  box.hi[0] = std::log(std::max(config.length_scale_max_factor * range,
                                config.length_scale_min));
  box.lo[1] = std::log(config.signal_std_min_factor * scale);
  box.hi[1] = std::log(config.signal_std_max_factor * scale);
  if (learn_noise) {
    box.lo[2] = std::log(config.noise_std_min_factor * scale);
    box.hi[2] = std::log(config.noise_std_max_factor * scale);
  }
  if (!box.lo.allFinite() || !box.hi.allFinite() ||
      (box.lo.array() > box.hi.array()).any()) {
    throw Error(ErrorCode::kInvalidInput, "invalid hyperparameter bounds");
  }

  Objective objective(train, noise, learn_noise, prior_mean);
  std::mt19937_64 rng(config.seed);
  double best = kInf;
  Eigen::VectorXd best_x;
  for (int s = 0; s < config.starts; ++s) {
    Eigen::VectorXd x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      x[i] = box.lo[i] + Uniform(rng) * (box.hi[i] - box.lo[i]);
    }
    const double fx = LocalSearch(objective, box, config.max_iterations, x);
    if (fx < best) {
      best = fx;
      best_x = x;
    }
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::kOptimizationFailure,
                "no optimizer start produced a finite marginal likelihood");
  }
  HyperparameterResult result;
  result.kernel = KernelParams{std::exp(best_x[0]), std::exp(best_x[1])};
  result.noise_variance =
      learn_noise ? std::exp(2.0 * best_x[2])
                  : (noise.is_constant() ? noise.constant() : 0.0);
  result.log_marginal_likelihood = -best;
  result.evaluations = objective.evaluations();
  return result;
}

HeteroGPModel fit_heteroscedastic(const TrainingSet& train,
                                  const HeteroConfig& config) {
  train.Validate();
  if (config.min_points < 2 || train.size() < config.min_points) {
    throw Error(ErrorCode::kInsufficientData,
                "heteroscedastic fit needs at least " +
                    std::to_string(std::max(config.min_points, 2)) + " points");
  }
  if (config.iterations < 1 || config.smoothing_window < 1 ||
      !(config.noise_floor > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "invalid heteroscedastic config");
  }
  const double prior_mean = train.y.mean();
  const Eigen::Index n = train.size();

  HeteroGPModel model;
  model.noise_floor = config.noise_floor;

  OptConfig opt = config.opt;
  opt.optimize_noise = true;
  const HyperparameterResult homo =
      optimize_hyperparameters(train, Noise::Constant(0.0), opt, prior_mean);
  KernelParams kernel = homo.kernel;
  model.signal = GPModel::Fit(
      train, kernel, Noise::Constant(std::max(homo.noise_variance, config.noise_floor)),
      prior_mean);

  // Unique timestamps, sorted, with the member indices of each.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return train.t[a] < train.t[b];
  });
  std::vector<double> times;
  std::vector<std::vector<Eigen::Index>> members;
  for (Eigen::Index i : order) {
    if (times.empty() || times.back() != train.t[i]) {
      times.push_back(train.t[i]);
      members.emplace_back();
    }
    members.back().push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(times.size());
  const int half = config.smoothing_window / 2;

  for (int iter = 0; iter < config.iterations; ++iter) {
    const Eigen::VectorXd mu = model.signal.Predict(train.t).mean;
    const Eigen::VectorXd sq = (train.y - mu).array().square().matrix();

    Eigen::VectorXd sums(m), counts(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      double s = 0.0;
      for (Eigen::Index i : members[static_cast<std::size_t>(j)]) s += sq[i];
      sums[j] = s;
      counts[j] = static_cast<double>(members[static_cast<std::size_t>(j)].size());
    }
    TrainingSet noise_data{Eigen::Map<const Eigen::VectorXd>(times.data(), m),
                           Eigen::VectorXd(m)};
    bool all_floor = true;
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, j - half);
      const Eigen::Index hi = std::min<Eigen::Index>(m - 1, j + half);
      const double v = sums.segment(lo, hi - lo + 1).sum() /
                       counts.segment(lo, hi - lo + 1).sum();
      if (v > config.noise_floor) all_floor = false;
      noise_data.y[j] = std::log(std::max(v, config.noise_floor));
    }
    model.degenerate_noise = all_floor;

    OptConfig noise_opt = config.opt;
    noise_opt.optimize_noise = true;
    noise_opt.seed = config.opt.seed + 0x9E3779B97F4A7C15ULL * (iter + 1);
    const double z_mean = noise_data.y.mean();
    if (m >= 2) {
      const HyperparameterResult zfit = optimize_hyperparameters(
          noise_data, Noise::Constant(0.0), noise_opt, z_mean);
      model.noise = GPModel::Fit(noise_data, zfit.kernel,
                                 Noise::Constant(zfit.noise_variance), z_mean);
    } else {
      model.noise = GPModel::Fit(noise_data, KernelParams{1.0, 1e-3},
                                 Noise::Constant(1e-6), z_mean);
    }

    const Eigen::VectorXd r = model.NoiseVariance(train.t);
    if (iter == 0 && config.reoptimize_after_noise) {
      OptConfig fixed = config.opt;
      fixed.optimize_noise = false;
      kernel = optimize_hyperparameters(train, Noise::PerPoint(r), fixed,
                                        prior_mean)
                   .kernel;
    }
    model.signal = GPModel::Fit(train, kernel, Noise::PerPoint(r), prior_mean);
  }
  return model;
}

}  // namespace gplfd
