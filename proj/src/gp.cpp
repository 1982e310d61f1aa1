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

#include "gplfd/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "gplfd/error.hpp"

namespace gplfd {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;

}  // namespace

void KernelParams::Validate() const {
  if (!(length_scale > 0.0) || !std::isfinite(length_scale) ||
      !(signal_std > 0.0) || !std::isfinite(signal_std)) {
    throw Error(ErrorCode::kInvalidInput,
                "kernel length scale and signal std must be positive");
  }
}

double rbf_kernel(double t, double t_prime, const KernelParams& p) {
  const double tau = t - t_prime;
  return p.signal_std * p.signal_std *
         std::exp(-tau * tau / (2.0 * p.length_scale * p.length_scale));
}

void TrainingSet::Validate() const {
  if (t.size() != y.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "training inputs and targets differ in length");
  }
  if (t.size() < 1) {
    throw Error(ErrorCode::kInvalidInput, "training set is empty");
  }
  if (!t.allFinite() || !y.allFinite()) {
    throw Error(ErrorCode::kInvalidInput, "training data is not finite");
  }
}

Noise Noise::Constant(double variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw Error(ErrorCode::kInvalidInput, "noise variance must be >= 0");
  }
  Noise n;
  n.constant_ = variance;
  return n;
}

Noise Noise::PerPoint(Eigen::VectorXd variances) {
  if (!variances.allFinite() || (variances.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidInput, "noise variances must be >= 0");
  }
  Noise n;
  n.per_point_ = std::move(variances);
  return n;
}

Eigen::VectorXd Noise::Expand(Eigen::Index n) const {
  if (!per_point_) return Eigen::VectorXd::Constant(n, constant_);
  if (per_point_->size() != n) {
    throw Error(ErrorCode::kInvalidInput,
                "noise vector length does not match the training set");
  }
  return *per_point_;
}

GPModel GPModel::Fit(const TrainingSet& train, const KernelParams& params,
                     const Noise& noise, double prior_mean) {
  train.Validate();
  params.Validate();
  GPModel m;
  m.train_ = train;
  m.params_ = params;
  m.noise_ = noise;
  m.prior_mean_ = prior_mean;
  m.Collapse();
  m.Factorize();
  m.fitted_ = true;
  return m;
}

void GPModel::Collapse() {
  const Eigen::Index n = train_.size();
  const Eigen::VectorXd r = noise_.Expand(n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     if (train_.t[a] != train_.t[b]) {
                       return train_.t[a] < train_.t[b];
                     }
                     return r[a] < r[b];
                   });
  groups_.clear();
  for (Eigen::Index idx : order) {
    if (!groups_.empty() && groups_.back().t == train_.t[idx] &&
        groups_.back().noise == r[idx]) {
      groups_.back().members.push_back(idx);
    } else {
      groups_.push_back(Group{train_.t[idx], r[idx], {idx}});
    }
  }
  const auto m = static_cast<Eigen::Index>(groups_.size());
  unique_t_.resize(m);
  mean_y_.resize(m);
  within_ss_.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Group& g = groups_[static_cast<std::size_t>(j)];
    if (g.members.size() > 1 && g.noise == 0.0) {
      throw Error(ErrorCode::kNumericalConditioning,
                  "duplicate timestamp t=" + std::to_string(g.t) +
                      " with zero noise makes the Gram matrix singular");
    }
    double sum = 0.0;
    for (Eigen::Index i : g.members) sum += train_.y[i] - prior_mean_;
    const double mean = sum / static_cast<double>(g.members.size());
    double ss = 0.0;
    for (Eigen::Index i : g.members) {
      const double d = train_.y[i] - prior_mean_ - mean;
      ss += d * d;
    }
    unique_t_[j] = g.t;
    mean_y_[j] = mean;
    within_ss_[j] = ss;
  }
}

void GPModel::Factorize() {
  const Eigen::Index m = unique_t_.size();
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = rbf_kernel(unique_t_[i], unique_t_[j], params_);
    }
  }
  const double diag = params_.signal_std * params_.signal_std;
  group_noise_.resize(m);
  for (double factor = kJitterStart; factor <= kJitterMax * 1.0000001;
       factor *= 10.0) {
    jitter_ = factor * diag;
    Eigen::MatrixXd ky = k;
    for (Eigen::Index j = 0; j < m; ++j) {
      const Group& g = groups_[static_cast<std::size_t>(j)];
      group_noise_[j] =
          (g.noise + jitter_) / static_cast<double>(g.members.size());
      ky(j, j) += group_noise_[j];
    }
    llt_.compute(ky);
    if (llt_.info() == Eigen::Success &&
        llt_.matrixLLT().diagonal().allFinite() &&
        (llt_.matrixLLT().diagonal().array() > 0.0).all()) {
      alpha_ = llt_.solve(mean_y_);
      if (alpha_.allFinite()) return;
    }
  }
  throw Error(ErrorCode::kNumericalConditioning,
              "Gram matrix is not positive definite after jitter escalation");
}

PosteriorPrediction GPModel::Predict(const Eigen::VectorXd& tq,
                                     const Eigen::VectorXd* extra_noise,
                                     bool full_covariance) const {
  if (!fitted_) throw Error(ErrorCode::kState, "GP model is not fitted");
  if (extra_noise != nullptr && extra_noise->size() != tq.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "extra noise length does not match the query");
  }
  const Eigen::Index q = tq.size();
  const Eigen::Index m = unique_t_.size();
  Eigen::MatrixXd kq(m, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      kq(i, j) = rbf_kernel(unique_t_[i], tq[j], params_);
    }
  }
  PosteriorPrediction out;
  out.mean = (kq.transpose() * alpha_).array() + prior_mean_;
  const Eigen::MatrixXd v = llt_.matrixL().solve(kq);
  const double prior_var = params_.signal_std * params_.signal_std;
  out.var = (prior_var - v.colwise().squaredNorm().array()).matrix().transpose();
  if (extra_noise != nullptr) out.var += *extra_noise;
  for (Eigen::Index j = 0; j < q; ++j) {
    if (out.var[j] < -1e-8) out.conditioning_warning = true;
    out.var[j] = std::max(out.var[j], 0.0);
  }
  if (full_covariance) {
    Eigen::MatrixXd cov(q, q);
    for (Eigen::Index i = 0; i < q; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        cov(i, j) = cov(j, i) = rbf_kernel(tq[i], tq[j], params_);
      }
    }
    cov.noalias() -= v.transpose() * v;
    if (extra_noise != nullptr) cov.diagonal() += *extra_noise;
    out.cov = std::move(cov);
  }
  return out;
}

double GPModel::LogMarginalLikelihood() const {
  if (!fitted_) throw Error(ErrorCode::kState, "GP model is not fitted");
  const Eigen::Index m = unique_t_.size();
  double lml = -0.5 * mean_y_.dot(alpha_) -
               llt_.matrixLLT().diagonal().array().log().sum() -
               0.5 * static_cast<double>(m) * kLog2Pi;
  for (Eigen::Index j = 0; j < m; ++j) {
    const Group& g = groups_[static_cast<std::size_t>(j)];
    const auto n = static_cast<double>(g.members.size());
    if (g.members.size() < 2) continue;
    const double r = g.noise + jitter_;
    lml += -0.5 * within_ss_[j] / r - 0.5 * (n - 1.0) * (kLog2Pi + std::log(r)) -
           0.5 * std::log(n);
  }
  return lml;
}

Eigen::Vector3d GPModel::LogMarginalLikelihoodGradient() const {
  if (!fitted_) throw Error(ErrorCode::kState, "GP model is not fitted");
  const Eigen::Index m = unique_t_.size();
  const Eigen::MatrixXd w =
      llt_.solve(Eigen::MatrixXd::Identity(m, m));
  const Eigen::MatrixXd a = alpha_ * alpha_.transpose() - w;
  const double l2 = params_.length_scale * params_.length_scale;
  const bool learn_noise = noise_.is_constant() && noise_.constant() > 0.0;

  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double kij = rbf_kernel(unique_t_[i], unique_t_[j], params_);
      const double tau = unique_t_[i] - unique_t_[j];
      grad[0] += a(i, j) * kij * tau * tau / l2;
      grad[1] += a(i, j) * 2.0 * kij;
    }
  }
  // The jitter is proportional to sigma_f^2, so it moves with log sigma_f.
  for (Eigen::Index j = 0; j < m; ++j) {
    const Group& g = groups_[static_cast<std::size_t>(j)];
    const auto n = static_cast<double>(g.members.size());
    const double r = g.noise + jitter_;
    grad[1] += a(j, j) * 2.0 * jitter_ / n;
    if (learn_noise) grad[2] += a(j, j) * 2.0 * g.noise / n;
    if (g.members.size() > 1) {
      const double dr_dsf = 2.0 * jitter_;
      const double dterm = within_ss_[j] / (r * r) - (n - 1.0) / r;
      grad[1] += dr_dsf * dterm;
      if (learn_noise) grad[2] += 2.0 * g.noise * dterm;
    }
  }
  grad[0] *= 0.5;
  grad[1] = 0.5 * grad[1];
  grad[2] = 0.5 * grad[2];
  return grad;
}

Eigen::MatrixXd GPModel::GramMatrix() const {
  const Eigen::Index n = train_.size();
  const Eigen::VectorXd r = noise_.Expand(n);
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = rbf_kernel(train_.t[i], train_.t[j], params_);
    }
    k(i, i) += r[i] + jitter_;
  }
  return k;
}

Eigen::MatrixXd GPModel::ReconstructedGramMatrix() const {
  const Eigen::MatrixXd l = llt_.matrixL();
  const Eigen::MatrixXd collapsed = l * l.transpose();
  const Eigen::Index n = train_.size();
  Eigen::MatrixXd k(n, n);
  std::vector<Eigen::Index> group_of(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < groups_.size(); ++j) {
    for (Eigen::Index i : groups_[j].members) {
      group_of[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(j);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index gi = group_of[static_cast<std::size_t>(i)];
      const Eigen::Index gj = group_of[static_cast<std::size_t>(j)];
      k(i, j) = collapsed(gi, gj);
      if (gi == gj) k(i, j) -= group_noise_[gi];
      if (i == j) k(i, j) += groups_[static_cast<std::size_t>(gi)].noise + jitter_;
    }
  }
  return k;
}

Eigen::VectorXd HeteroGPModel::NoiseVariance(const Eigen::VectorXd& tq) const {
  const Eigen::VectorXd z = noise.Predict(tq).mean;
  return z.array().exp().max(noise_floor).matrix();
}

PosteriorPrediction HeteroGPModel::Predict(const Eigen::VectorXd& tq) const {
  const Eigen::VectorXd r = NoiseVariance(tq);
  return signal.Predict(tq, &r);
}

PosteriorPrediction gaussian_product(const PosteriorPrediction& a,
                                     const PosteriorPrediction& b) {
  if (a.size() != b.size() || a.var.size() != a.size() ||
      b.var.size() != b.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "gaussian product operands differ in length");
  }
  PosteriorPrediction out;
  out.mean.resize(a.size());
  out.var.resize(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double va = a.var[i];
    const double vb = b.var[i];
    if (!(va >= 0.0) || !(vb >= 0.0)) {
      throw Error(ErrorCode::kInvalidInput,
                  "gaussian product needs nonnegative variances");
    }
    if (std::isinf(vb)) {
      out.mean[i] = a.mean[i];
      out.var[i] = va;
    } else if (std::isinf(va)) {
      out.mean[i] = b.mean[i];
      out.var[i] = vb;
    } else if (va == 0.0 && vb == 0.0) {
      const double scale = std::max({1.0, std::abs(a.mean[i]), std::abs(b.mean[i])});
      if (std::abs(a.mean[i] - b.mean[i]) > 1e-12 * scale) {
        throw Error(ErrorCode::kInconsistentConstraint,
                    "two exact constraints disagree at index " +
                        std::to_string(i));
      }
      out.mean[i] = a.mean[i];
      out.var[i] = 0.0;
    } else {
      const double s = va + vb;
      out.mean[i] = (vb * a.mean[i] + va * b.mean[i]) / s;
      out.var[i] = va * vb / s;
    }
  }
  return out;
}

PosteriorPrediction predict(const GPModel& model, const Eigen::VectorXd& tq) {
  return model.Predict(tq);
}

double log_marginal_likelihood(const GPModel& model) {
  return model.LogMarginalLikelihood();
}

}  // namespace gplfd
