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

// Temporal alignment of demonstrations: the task completion index (TCI),
// dynamic time warping under a pose or TCI cost, warping of a demonstration
// set onto a reference clock, and resampling onto a time grid.

#ifndef GPLFD_ALIGNMENT_HPP_
#define GPLFD_ALIGNMENT_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gplfd/se3.hpp"

namespace gplfd {

struct Trajectory {
  std::vector<double> stamps;
  std::vector<Pose> poses;

  std::size_t size() const { return stamps.size(); }
  // Throws kInvalidInput unless sizes match, size >= 2 and stamps strictly
  // increase.
  void Validate() const;
};

// Cumulative normalized arc length; zeta.front() == 0, zeta.back() == 1.
struct TciProfile {
  std::vector<double> zeta;
};

enum class DtwMeasure { kEuclideanPose, kTci };

struct WarpPath {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double cost = 0.0;
};

double path_length(const Trajectory& traj, const DistanceWeights& w);

// Throws kDegenerateTrajectory when the total path length is zero.
TciProfile tci_profile(const Trajectory& traj, const DistanceWeights& w);

// Optimal monotone, continuous warp for a precomputed local cost matrix
// (rows index the first sequence, columns the reference). Ties prefer the
// diagonal step, then the step advancing the reference.
WarpPath dtw_from_cost(const Eigen::MatrixXd& cost);

WarpPath dtw_align(const Trajectory& a, const Trajectory& reference,
                   const DistanceWeights& w, DtwMeasure measure);

struct AlignConfig {
  DtwMeasure measure = DtwMeasure::kTci;
};

struct AlignmentWarning {
  std::size_t demo = 0;
  std::string message;
};

struct AlignmentResult {
  std::vector<Trajectory> aligned;
  std::vector<std::size_t> source;  // input index of each aligned trajectory
  std::size_t reference = 0;        // input index of the reference
  std::vector<AlignmentWarning> warnings;
};

// Warps every demonstration onto the clock of the median-length reference,
// normalized to [0, 1]. Degenerate demonstrations are skipped with a
// warning. Throws kInsufficientData if nothing usable remains.
AlignmentResult align_demonstrations(const std::vector<Trajectory>& demos,
                                     const DistanceWeights& w,
                                     const AlignConfig& config = {});

// Warps one trajectory onto the given reference clock.
Trajectory warp_onto(const Trajectory& demo, const Trajectory& reference,
                     const DistanceWeights& w, DtwMeasure measure);

Trajectory normalize_time(const Trajectory& traj);

// Linear in position, geodesic in rotation. Throws kInvalidInput for grid
// values outside [stamps.front(), stamps.back()].
Trajectory resample(const Trajectory& traj, const std::vector<double>& grid);

std::vector<double> uniform_grid(std::size_t n, double lo = 0.0, double hi = 1.0);

}  // namespace gplfd

#endif  // GPLFD_ALIGNMENT_HPP_
