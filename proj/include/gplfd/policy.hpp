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

// Task policy: six independent heteroscedastic GPs over normalized time, one
// per pose coordinate (x, y, z, theta*ux, theta*uy, theta*uz), learned from
// aligned and resampled demonstrations. Via-points are fused with the
// demonstration posterior by a product of Gaussians.

#ifndef GPLFD_POLICY_HPP_
#define GPLFD_POLICY_HPP_

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "gplfd/alignment.hpp"
#include "gplfd/gp.hpp"
#include "gplfd/se3.hpp"

namespace gplfd {

inline constexpr int kPoseDims = 6;

struct LearnConfig {
  DistanceWeights weights;
  AlignConfig align;
  int grid_size = 100;
  HeteroConfig hetero;
};

struct PoseDistribution {
  double t = 0.0;
  Vector6d mean = Vector6d::Zero();
  Vector6d var = Vector6d::Zero();
  bool extrapolated = false;
  // Set when the assembled rotation mean left the ball of radius pi.
  bool boundary_warning = false;

  Pose pose() const { return Pose::FromVector(mean); }
};

class TaskPolicy {
 public:
  TaskPolicy() = default;
  TaskPolicy(std::array<HeteroGPModel, kPoseDims> dims, Trajectory reference,
             DistanceWeights weights, std::vector<double> grid);

  std::vector<PoseDistribution> Query(const std::vector<double>& tq) const;
  PosteriorPrediction QueryDimension(int dim, const Eigen::VectorXd& tq) const;

  const HeteroGPModel& dimension(int dim) const;
  const std::array<HeteroGPModel, kPoseDims>& dimensions() const { return dims_; }
  // Reference demonstration on the normalized clock; used to bring new
  // trajectories onto the policy's time axis.
  const Trajectory& reference() const { return reference_; }
  const DistanceWeights& weights() const { return weights_; }
  const std::vector<double>& grid() const { return grid_; }

 private:
  std::array<HeteroGPModel, kPoseDims> dims_;
  Trajectory reference_;
  DistanceWeights weights_;
  std::vector<double> grid_;
};

// Throws kInsufficientData for fewer than two usable demonstrations.
TaskPolicy learn_policy(const std::vector<Trajectory>& demos,
                        const LearnConfig& config);

std::vector<PoseDistribution> query(const TaskPolicy& policy,
                                    const std::vector<double>& tq);

struct ViaPoint {
  double t = 0.0;
  Pose pose;
  Vector6d strength = Vector6d::Constant(1e-4);  // observation variances

  void Validate() const;
};

// Holds the demonstration-side posterior on a fixed query grid; Adapt only
// fits the via-point GPs.
class PolicyAdapter {
 public:
  PolicyAdapter(const TaskPolicy& policy, std::vector<double> tq);

  const std::array<PosteriorPrediction, kPoseDims>& demo_posterior() const {
    return demo_;
  }
  const std::vector<double>& times() const { return tq_; }

  // Throws kInconsistentConstraint when via-points at the same time disagree
  // by more than ten combined standard deviations.
  std::vector<PoseDistribution> Adapt(const std::vector<ViaPoint>& via) const;
  // Same, restricted to the listed query indices.
  std::vector<PoseDistribution> Adapt(const std::vector<ViaPoint>& via,
                                      const std::vector<std::size_t>& indices) const;

  // Via-point side distribution of one dimension on the query grid.
  PosteriorPrediction ViaPosterior(int dim, const std::vector<ViaPoint>& via,
                                   const Eigen::VectorXd& tq) const;

 private:
  const TaskPolicy* policy_;
  std::vector<double> tq_;
  Eigen::VectorXd tq_vec_;
  std::array<PosteriorPrediction, kPoseDims> demo_;
};

std::vector<PoseDistribution> adapt_with_viapoints(
    const TaskPolicy& policy, const std::vector<ViaPoint>& via,
    const std::vector<double>& tq);

// Per-dimension time average of (mean - truth)^2 + var. Timestamps of the
// predictions and the truth must agree.
Vector6d prediction_error(const std::vector<PoseDistribution>& pred,
                          const Trajectory& truth);

struct StreamingEvaluation {
  std::vector<double> times;  // evaluated steps t_1 .. t_n
  Trajectory truth;           // truth on the policy grid
  std::vector<PoseDistribution> static_prediction;
  std::vector<PoseDistribution> adaptive_prediction;
  Vector6d static_mse = Vector6d::Zero();
  Vector6d adaptive_mse = Vector6d::Zero();
};

// Brings `truth` onto the policy clock (TCI alignment against the policy
// reference, then resampling on the policy grid) and, for every grid step
// t_i, conditions on the truth samples up to t_{i-1} as via-points before
// predicting t_i.
StreamingEvaluation evaluate_streaming(const TaskPolicy& policy,
                                       const Trajectory& truth,
                                       const Vector6d& via_strength);

}  // namespace gplfd

#endif  // GPLFD_POLICY_HPP_
