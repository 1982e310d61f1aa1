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

// Single-output Gaussian-process regression over a scalar input (time) with
// the squared-exponential kernel, optionally with per-point noise, plus the
// two-stage heteroscedastic fit and the Gaussian product used for fusion.

#ifndef GPLFD_GP_HPP_
#define GPLFD_GP_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace gplfd {

struct KernelParams {
  double length_scale = 1.0;
  double signal_std = 1.0;

  void Validate() const;
};

double rbf_kernel(double t, double t_prime, const KernelParams& p);

struct TrainingSet {
  Eigen::VectorXd t;
  Eigen::VectorXd y;

  Eigen::Index size() const { return t.size(); }
  void Validate() const;
};

// Observation noise variance: one value shared by every point, or one per
// point.
class Noise {
 public:
  static Noise Constant(double variance);
  static Noise PerPoint(Eigen::VectorXd variances);

  bool is_constant() const { return !per_point_.has_value(); }
  double constant() const { return constant_; }
  Eigen::VectorXd Expand(Eigen::Index n) const;

 private:
  Noise() = default;

  double constant_ = 0.0;
  std::optional<Eigen::VectorXd> per_point_;
};

struct PosteriorPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  std::optional<Eigen::MatrixXd> cov;
  // Set when a predictive variance fell below -1e-8 before clamping.
  bool conditioning_warning = false;

  Eigen::Index size() const { return mean.size(); }
};

// Fitted GP. Observations sharing a timestamp and a noise value are collapsed
// into their mean with noise divided by the count; this gives the same
// posterior as the full Gram matrix, and the likelihood differs only by the
// within-group terms, which are added back.
class GPModel {
 public:
  GPModel() = default;

  // Throws kNumericalConditioning when the Gram matrix cannot be factorized
  // after jitter escalation, or when duplicate timestamps carry zero noise.
  static GPModel Fit(const TrainingSet& train, const KernelParams& params,
                     const Noise& noise, double prior_mean = 0.0);

  bool fitted() const { return fitted_; }

  // Posterior at tq. `extra_noise`, when given, is added to the predictive
  // variance (the R(t*) term of the heteroscedastic model).
  PosteriorPrediction Predict(const Eigen::VectorXd& tq,
                              const Eigen::VectorXd* extra_noise = nullptr,
                              bool full_covariance = false) const;

  double LogMarginalLikelihood() const;

  // Gradient of the log marginal likelihood with respect to
  // (log l, log sigma_f, log sigma_n). The last entry is zero when the noise
  // is not a positive constant.
  Eigen::Vector3d LogMarginalLikelihoodGradient() const;

  const TrainingSet& train() const { return train_; }
  const KernelParams& params() const { return params_; }
  const Noise& noise() const { return noise_; }
  double prior_mean() const { return prior_mean_; }
  double jitter() const { return jitter_; }

  // K(t,t) + R(t) + jitter*I over the original (uncollapsed) points.
  Eigen::MatrixXd GramMatrix() const;
  // Reassembles the collapsed factorization into the full Gram matrix.
  Eigen::MatrixXd ReconstructedGramMatrix() const;

 private:
  struct Group {
    double t;
    double noise;
    std::vector<Eigen::Index> members;
  };

  void Collapse();
  void Factorize();

  bool fitted_ = false;
  TrainingSet train_;
  KernelParams params_;
  Noise noise_ = Noise::Constant(0.0);
  double prior_mean_ = 0.0;
  double jitter_ = 0.0;

  std::vector<Group> groups_;
  Eigen::VectorXd unique_t_;
  Eigen::VectorXd mean_y_;         // centered group means
  Eigen::VectorXd group_noise_;    // (r + jitter) / n
  Eigen::VectorXd within_ss_;      // sum of squared deviations per group
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

struct OptConfig {
  int starts = 8;
  int max_iterations = 100;
  std::uint64_t seed = 0;
  bool optimize_noise = true;  // only honoured for constant noise
  double length_scale_min = 1e-3;
  double length_scale_max_factor = 10.0;   // times range(t)
  double signal_std_min_factor = 1e-3;     // times std(y)
  double signal_std_max_factor = 10.0;     // times std(y)
  double noise_std_min_factor = 1e-4;      // times std(y)
  double noise_std_max_factor = 1.0;       // times std(y)
};

struct HyperparameterResult {
  KernelParams kernel;
  double noise_variance = 0.0;  // the optimized or the supplied constant
  double log_marginal_likelihood = 0.0;
  int evaluations = 0;
};

// Multi-start local search in log-parameter space using the analytic
// gradient. Throws kOptimizationFailure when no start yields a finite value.
HyperparameterResult optimize_hyperparameters(const TrainingSet& train,
                                              const Noise& noise,
                                              const OptConfig& config,
                                              double prior_mean = 0.0);

struct HeteroConfig {
  int iterations = 3;
  int min_points = 10;
  int smoothing_window = 5;
  double noise_floor = 1e-8;
  bool reoptimize_after_noise = true;
  OptConfig opt;
};

struct HeteroGPModel {
  GPModel signal;
  GPModel noise;  // over z(t) = log r(t)
  bool degenerate_noise = false;
  double noise_floor = 1e-8;

  Eigen::VectorXd NoiseVariance(const Eigen::VectorXd& tq) const;
  PosteriorPrediction Predict(const Eigen::VectorXd& tq) const;
};

HeteroGPModel fit_heteroscedastic(const TrainingSet& train,
                                  const HeteroConfig& config);

// Elementwise product of two diagonal Gaussians. A variance of +inf means the
// side carries no information. Throws kInconsistentConstraint when both
// variances are zero at a point with different means.
PosteriorPrediction gaussian_product(const PosteriorPrediction& a,
                                     const PosteriorPrediction& b);

// Free-function spellings of the GPModel members.
inline GPModel fit_gp(const TrainingSet& train, const KernelParams& params,
                      const Noise& noise) {
  return GPModel::Fit(train, params, noise);
}
PosteriorPrediction predict(const GPModel& model, const Eigen::VectorXd& tq);
double log_marginal_likelihood(const GPModel& model);

}  // namespace gplfd

#endif  // GPLFD_GP_HPP_
