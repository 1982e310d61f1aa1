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

#include "gplfd/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gplfd/error.hpp"

namespace gplfd {
namespace {

Eigen::VectorXd ToVector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

// Re-canonicalizes the rotation block of an assembled mean.
void AssembleRotation(PoseDistribution& p) {
  const Eigen::Vector3d r = p.mean.tail<3>();
  if (r.norm() > std::numbers::pi) p.boundary_warning = true;
  p.mean.tail<3>() = RotationVector::FromVector(r).vector();
}

// Log-linear interpolation of via-point strengths in time, constant beyond
// the first and last via-point.
Eigen::VectorXd InterpolateStrength(const std::vector<double>& times,
                                    const std::vector<double>& log_strength,
                                    const Eigen::VectorXd& tq) {
  Eigen::VectorXd out(tq.size());
  for (Eigen::Index q = 0; q < tq.size(); ++q) {
    const double t = tq[q];
    if (t <= times.front()) {
      out[q] = std::exp(log_strength.front());
      continue;
    }
    if (t >= times.back()) {
      out[q] = std::exp(log_strength.back());
      continue;
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
    const double lambda = (t - times[k]) / (times[k + 1] - times[k]);
    out[q] = std::exp((1.0 - lambda) * log_strength[k] +
                      lambda * log_strength[k + 1]);
  }
  return out;
}

}  // namespace

TaskPolicy::TaskPolicy(std::array<HeteroGPModel, kPoseDims> dims,
                       Trajectory reference, DistanceWeights weights,
                       std::vector<double> grid)
    : dims_(std::move(dims)),
      reference_(std::move(reference)),
      weights_(weights),
      grid_(std::move(grid)) {}

const HeteroGPModel& TaskPolicy::dimension(int dim) const {
  if (dim < 0 || dim >= kPoseDims) {
    throw Error(ErrorCode::kInvalidInput, "pose dimension out of range");
  }
  return dims_[static_cast<std::size_t>(dim)];
}

PosteriorPrediction TaskPolicy::QueryDimension(int dim,
                                               const Eigen::VectorXd& tq) const {
  return dimension(dim).Predict(tq);
}

std::vector<PoseDistribution> TaskPolicy::Query(
    const std::vector<double>& tq) const {
  const Eigen::VectorXd t = ToVector(tq);
  std::vector<PoseDistribution> out(tq.size());
  for (int d = 0; d < kPoseDims; ++d) {
    const PosteriorPrediction p = QueryDimension(d, t);
    for (std::size_t q = 0; q < tq.size(); ++q) {
      const auto qi = static_cast<Eigen::Index>(q);
      out[q].mean[d] = p.mean[qi];
      out[q].var[d] = p.var[qi];
    }
  }
  for (std::size_t q = 0; q < tq.size(); ++q) {
    out[q].t = tq[q];
    out[q].extrapolated = tq[q] < 0.0 || tq[q] > 1.0;
    AssembleRotation(out[q]);
  }
  return out;
}

TaskPolicy learn_policy(const std::vector<Trajectory>& demos,
                        const LearnConfig& config) {
  if (demos.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "learning a policy needs at least 2 demonstrations, got " +
                    std::to_string(demos.size()));
  }
  if (config.grid_size < 2) {
    throw Error(ErrorCode::kInvalidInput, "grid size must be >= 2");
  }
  const AlignmentResult aligned =
      align_demonstrations(demos, config.weights, config.align);
  if (aligned.aligned.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "fewer than 2 usable demonstrations after alignment");
  }
  const std::vector<double> grid =
      uniform_grid(static_cast<std::size_t>(config.grid_size));
  std::vector<Trajectory> resampled;
  resampled.reserve(aligned.aligned.size());
  for (const Trajectory& traj : aligned.aligned) {
    resampled.push_back(resample(traj, grid));
  }

  const auto g = static_cast<Eigen::Index>(grid.size());
  const auto k = static_cast<Eigen::Index>(resampled.size());
  Eigen::VectorXd t(g * k);
  for (Eigen::Index j = 0; j < k; ++j) t.segment(j * g, g) = ToVector(grid);

  std::array<HeteroGPModel, kPoseDims> dims;
  for (int d = 0; d < kPoseDims; ++d) {
    TrainingSet train{t, Eigen::VectorXd(g * k)};
    for (Eigen::Index j = 0; j < k; ++j) {
      for (Eigen::Index i = 0; i < g; ++i) {
        train.y[j * g + i] = resampled[static_cast<std::size_t>(j)]
                                 .poses[static_cast<std::size_t>(i)]
                                 .ToVector()[d];
      }
    }
    HeteroConfig hetero = config.hetero;
    hetero.opt.seed = config.hetero.opt.seed + static_cast<std::uint64_t>(d) * 1000003u;
    dims[static_cast<std::size_t>(d)] = fit_heteroscedastic(train, hetero);
  }

  Trajectory reference;
  for (std::size_t j = 0; j < aligned.source.size(); ++j) {
    if (aligned.source[j] == aligned.reference) reference = aligned.aligned[j];
  }
  return TaskPolicy(std::move(dims), std::move(reference), config.weights, grid);
}

std::vector<PoseDistribution> query(const TaskPolicy& policy,
                                    const std::vector<double>& tq) {
  return policy.Query(tq);
}

void ViaPoint::Validate() const {
  if (!std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidInput, "via-point time is not finite");
  }
  if (!strength.allFinite() || (strength.array() <= 0.0).any()) {
    throw Error(ErrorCode::kInvalidInput,
                "via-point strengths must be positive and finite");
  }
  if (!pose.position.allFinite() || !pose.rotation.IsCanonical()) {
    throw Error(ErrorCode::kInvalidInput, "via-point pose is invalid");
  }
}

PolicyAdapter::PolicyAdapter(const TaskPolicy& policy, std::vector<double> tq)
    : policy_(&policy), tq_(std::move(tq)), tq_vec_(ToVector(tq_)) {
  for (int d = 0; d < kPoseDims; ++d) {
    demo_[static_cast<std::size_t>(d)] = policy.QueryDimension(d, tq_vec_);
  }
}

PosteriorPrediction PolicyAdapter::ViaPosterior(
    int dim, const std::vector<ViaPoint>& via, const Eigen::VectorXd& tq) const {
  const auto n = static_cast<Eigen::Index>(via.size());
  TrainingSet train{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  Eigen::VectorXd strength(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ViaPoint& v = via[static_cast<std::size_t>(i)];
    train.t[i] = v.t;
    train.y[i] = v.pose.ToVector()[dim];
    strength[i] = v.strength[dim];
  }
  // The via-point GP models the deviation from the demonstration mean, so
  // far from every via-point it reverts to the policy.
  train.y -= policy_->QueryDimension(dim, train.t).mean;
  const KernelParams kernel = policy_->dimension(dim).signal.params();
  const GPModel gp = GPModel::Fit(train, kernel, Noise::PerPoint(strength));

  std::vector<std::size_t> order(via.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return via[a].t < via[b].t;
  });
  std::vector<double> times;
  std::vector<double> precision;
  for (std::size_t i : order) {
    const double p = 1.0 / via[i].strength[dim];
    if (!times.empty() && times.back() == via[i].t) {
      precision.back() += p;
    } else {
      times.push_back(via[i].t);
      precision.push_back(p);
    }
  }
  std::vector<double> log_strength(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    log_strength[i] = -std::log(precision[i]);
  }
  const Eigen::VectorXd r = InterpolateStrength(times, log_strength, tq);
  PosteriorPrediction out = gp.Predict(tq, &r);
  out.mean += policy_->QueryDimension(dim, tq).mean;
  return out;
}

std::vector<PoseDistribution> PolicyAdapter::Adapt(
    const std::vector<ViaPoint>& via) const {
  std::vector<std::size_t> all(tq_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return Adapt(via, all);
}

std::vector<PoseDistribution> PolicyAdapter::Adapt(
    const std::vector<ViaPoint>& via,
    const std::vector<std::size_t>& indices) const {
  if (via.empty()) {
    throw Error(ErrorCode::kInvalidInput, "adaptation needs via-points");
  }
  for (const ViaPoint& v : via) v.Validate();
  for (std::size_t a = 0; a < via.size(); ++a) {
    for (std::size_t b = a + 1; b < via.size(); ++b) {
      if (via[a].t != via[b].t) continue;
      const Vector6d diff = via[a].pose.ToVector() - via[b].pose.ToVector();
      for (int d = 0; d < kPoseDims; ++d) {
        if (std::abs(diff[d]) >
            10.0 * std::sqrt(via[a].strength[d] + via[b].strength[d])) {
          throw Error(ErrorCode::kInconsistentConstraint,
                      "via-points at t=" + std::to_string(via[a].t) +
                          " disagree in dimension " + std::to_string(d));
        }
      }
    }
  }
  for (std::size_t i : indices) {
    if (i >= tq_.size()) {
      throw Error(ErrorCode::kInvalidInput, "query index out of range");
    }
  }

  const auto n = static_cast<Eigen::Index>(indices.size());
  Eigen::VectorXd tq(n);
  for (Eigen::Index i = 0; i < n; ++i) tq[i] = tq_[indices[static_cast<std::size_t>(i)]];

  std::vector<PoseDistribution> out(indices.size());
  for (int d = 0; d < kPoseDims; ++d) {
    const PosteriorPrediction& full = demo_[static_cast<std::size_t>(d)];
    PosteriorPrediction demo;
    demo.mean.resize(n);
    demo.var.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto src = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]);
      demo.mean[i] = full.mean[src];
      demo.var[i] = full.var[src];
    }
    const PosteriorPrediction fused =
        gaussian_product(demo, ViaPosterior(d, via, tq));
    for (Eigen::Index i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)].mean[d] = fused.mean[i];
      out[static_cast<std::size_t>(i)].var[d] = fused.var[i];
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    PoseDistribution& p = out[static_cast<std::size_t>(i)];
    p.t = tq[i];
    p.extrapolated = p.t < 0.0 || p.t > 1.0;
    AssembleRotation(p);
  }
  return out;
}

std::vector<PoseDistribution> adapt_with_viapoints(
    const TaskPolicy& policy, const std::vector<ViaPoint>& via,
    const std::vector<double>& tq) {
  return PolicyAdapter(policy, tq).Adapt(via);
}

Vector6d prediction_error(const std::vector<PoseDistribution>& pred,
                          const Trajectory& truth) {
  if (pred.size() != truth.poses.size() || pred.size() != truth.stamps.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "prediction and truth differ in length (" +
                    std::to_string(pred.size()) + " vs " +
                    std::to_string(truth.poses.size()) + ")");
  }
  if (pred.empty()) {
    throw Error(ErrorCode::kInvalidInput, "prediction error of an empty series");
  }
  Vector6d total = Vector6d::Zero();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (std::abs(pred[i].t - truth.stamps[i]) > 1e-12) {
      throw Error(ErrorCode::kInvalidInput,
                  "prediction and truth timestamps differ at index " +
                      std::to_string(i));
    }
    const Vector6d bias = pred[i].mean - truth.poses[i].ToVector();
    total += (bias.array().square() + pred[i].var.array()).matrix();
  }
  return total / static_cast<double>(pred.size());
}

StreamingEvaluation evaluate_streaming(const TaskPolicy& policy,
                                       const Trajectory& truth,
                                       const Vector6d& via_strength) {
  const Trajectory on_clock =
      warp_onto(truth, policy.reference(), policy.weights(), DtwMeasure::kTci);
  StreamingEvaluation eval;
  eval.truth = resample(on_clock, policy.grid());
  const std::vector<double>& grid = policy.grid();
  const PolicyAdapter adapter(policy, grid);
  const std::vector<PoseDistribution> prior = policy.Query(grid);

  Trajectory truth_steps;
  std::vector<ViaPoint> via;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    via.push_back(ViaPoint{grid[i - 1], eval.truth.poses[i - 1], via_strength});
    eval.times.push_back(grid[i]);
    eval.static_prediction.push_back(prior[i]);
    eval.adaptive_prediction.push_back(adapter.Adapt(via, {i}).front());
    truth_steps.stamps.push_back(grid[i]);
    truth_steps.poses.push_back(eval.truth.poses[i]);
  }
  eval.static_mse = prediction_error(eval.static_prediction, truth_steps);
  eval.adaptive_mse = prediction_error(eval.adaptive_prediction, truth_steps);
  return eval;
}

}  // namespace gplfd
