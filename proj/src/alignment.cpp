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

#include "gplfd/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gplfd/error.hpp"

namespace gplfd {

void Trajectory::Validate() const {
  if (stamps.size() != poses.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "trajectory stamps and poses differ in length");
  }
  if (stamps.size() < 2) {
    throw Error(ErrorCode::kInvalidInput,
                "trajectory needs at least 2 samples");
  }
  for (std::size_t k = 0; k < stamps.size(); ++k) {
    if (!std::isfinite(stamps[k])) {
      throw Error(ErrorCode::kInvalidInput, "trajectory stamp is not finite");
    }
    if (k > 0 && !(stamps[k] > stamps[k - 1])) {
      throw Error(ErrorCode::kInvalidInput,
                  "trajectory stamps are not strictly increasing at sample " +
                      std::to_string(k));
    }
  }
}

double path_length(const Trajectory& traj, const DistanceWeights& w) {
  double total = 0.0;
  for (std::size_t k = 1; k < traj.poses.size(); ++k) {
    total += pose_distance(traj.poses[k], traj.poses[k - 1], w);
  }
  return total;
}

TciProfile tci_profile(const Trajectory& traj, const DistanceWeights& w) {
  traj.Validate();
  std::vector<double> cumulative(traj.size(), 0.0);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    cumulative[k] = cumulative[k - 1] +
                    pose_distance(traj.poses[k], traj.poses[k - 1], w);
  }
  const double total = cumulative.back();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::kDegenerateTrajectory,
                "trajectory has zero total path length");
  }
  TciProfile out;
  out.zeta.resize(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out.zeta[k] = cumulative[k] / total;
  }
  out.zeta.back() = 1.0;
  return out;
}

WarpPath dtw_from_cost(const Eigen::MatrixXd& cost) {
  const Eigen::Index n = cost.rows();
  const Eigen::Index m = cost.cols();
  if (n < 1 || m < 1) {
    throw Error(ErrorCode::kInvalidInput, "DTW needs non-empty sequences");
  }
  Eigen::MatrixXd acc(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else if (i == 0) {
        best = acc(0, j - 1);
      } else if (j == 0) {
        best = acc(i - 1, 0);
      } else {
        best = std::min({acc(i - 1, j - 1), acc(i, j - 1), acc(i - 1, j)});
      }
      acc(i, j) = best + cost(i, j);
    }
  }

  WarpPath path;
  path.cost = acc(n - 1, m - 1);
  Eigen::Index i = n - 1;
  Eigen::Index j = m - 1;
  path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = acc(i - 1, j - 1);
      const double ref = acc(i, j - 1);
      const double other = acc(i - 1, j);
      if (diag <= ref && diag <= other) {
        --i;
        --j;
      } else if (ref <= other) {
        --j;
      } else {
        --i;
      }
    }
    path.pairs.emplace_back(i, j);
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

WarpPath dtw_align(const Trajectory& a, const Trajectory& reference,
                   const DistanceWeights& w, DtwMeasure measure) {
  a.Validate();
  reference.Validate();
  const auto n = static_cast<Eigen::Index>(a.size());
  const auto m = static_cast<Eigen::Index>(reference.size());
  Eigen::MatrixXd cost(n, m);
  if (measure == DtwMeasure::kTci) {
    const TciProfile za = tci_profile(a, w);
    const TciProfile zb = tci_profile(reference, w);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        cost(i, j) = std::abs(za.zeta[static_cast<std::size_t>(i)] -
                              zb.zeta[static_cast<std::size_t>(j)]);
      }
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        cost(i, j) = pose_distance(a.poses[static_cast<std::size_t>(i)],
                                   reference.poses[static_cast<std::size_t>(j)],
                                   w);
      }
    }
  }
  return dtw_from_cost(cost);
}

Trajectory normalize_time(const Trajectory& traj) {
  traj.Validate();
  Trajectory out = traj;
  const double t0 = traj.stamps.front();
  const double span = traj.stamps.back() - t0;
  for (double& t : out.stamps) t = (t - t0) / span;
  out.stamps.front() = 0.0;
  out.stamps.back() = 1.0;
  return out;
}

Trajectory warp_onto(const Trajectory& demo, const Trajectory& reference,
                     const DistanceWeights& w, DtwMeasure measure) {
  const WarpPath path = dtw_align(demo, reference, w, measure);
  std::vector<std::vector<std::size_t>> matched(reference.size());
  for (const auto& [i, j] : path.pairs) matched[j].push_back(i);

  Trajectory out;
  out.stamps = reference.stamps;
  out.poses.reserve(reference.size());
  for (const auto& idx : matched) {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Vector3d rotation_mean = Eigen::Vector3d::Zero();
    for (std::size_t i : idx) {
      position += demo.poses[i].position;
      rotation_mean += demo.poses[i].rotation.vector();
    }
    position /= static_cast<double>(idx.size());
    rotation_mean /= static_cast<double>(idx.size());
    const RotationVector mean_rot = RotationVector::FromVector(rotation_mean);
    std::size_t pick = idx.front();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : idx) {
      const double d = arc_distance(demo.poses[i].rotation, mean_rot);
      if (d < best) {
        best = d;
        pick = i;
      }
    }
    out.poses.push_back(Pose{position, demo.poses[pick].rotation});
  }
  return out;
}

AlignmentResult align_demonstrations(const std::vector<Trajectory>& demos,
                                     const DistanceWeights& w,
                                     const AlignConfig& config) {
  if (demos.empty()) {
    throw Error(ErrorCode::kInsufficientData, "no demonstrations to align");
  }
  AlignmentResult result;
  std::vector<std::size_t> usable;
  std::vector<double> lengths(demos.size(), 0.0);
  for (std::size_t k = 0; k < demos.size(); ++k) {
    try {
      demos[k].Validate();
      lengths[k] = path_length(demos[k], w);
      if (!(lengths[k] > 0.0) || !std::isfinite(lengths[k])) {
        throw Error(ErrorCode::kDegenerateTrajectory,
                    "trajectory has zero total path length");
      }
      usable.push_back(k);
    } catch (const Error& e) {
      result.warnings.push_back({k, e.what()});
    }
  }
  if (usable.empty()) {
    throw Error(ErrorCode::kInsufficientData,
                "every demonstration is degenerate");
  }
  std::vector<std::size_t> by_length = usable;
  std::stable_sort(by_length.begin(), by_length.end(),
                   [&](std::size_t a, std::size_t b) {
                     return lengths[a] < lengths[b];
                   });
  result.reference = by_length[(by_length.size() - 1) / 2];
  const Trajectory reference = normalize_time(demos[result.reference]);

  for (std::size_t k : usable) {
    if (k == result.reference) {
      result.aligned.push_back(reference);
    } else {
      result.aligned.push_back(
          warp_onto(demos[k], reference, w, config.measure));
    }
    result.source.push_back(k);
  }
  return result;
}

Trajectory resample(const Trajectory& traj, const std::vector<double>& grid) {
  traj.Validate();
  const double lo = traj.stamps.front();
  const double hi = traj.stamps.back();
  Trajectory out;
  out.stamps = grid;
  out.poses.reserve(grid.size());
  for (double g : grid) {
    if (!(g >= lo && g <= hi)) {
      throw Error(ErrorCode::kInvalidInput,
                  "resample grid value " + std::to_string(g) +
                      " outside the trajectory time range");
    }
    auto it = std::upper_bound(traj.stamps.begin(), traj.stamps.end(), g);
    std::size_t k = static_cast<std::size_t>(it - traj.stamps.begin());
    if (k == traj.size()) {
      out.poses.push_back(traj.poses.back());
      continue;
    }
    k -= 1;
    if (g == traj.stamps[k]) {
      out.poses.push_back(traj.poses[k]);
      continue;
    }
    const double lambda =
        (g - traj.stamps[k]) / (traj.stamps[k + 1] - traj.stamps[k]);
    const Pose& a = traj.poses[k];
    const Pose& b = traj.poses[k + 1];
    Pose p;
    p.position = (1.0 - lambda) * a.position + lambda * b.position;
    p.rotation = RotationVector::FromQuaternion(
        a.rotation.quaternion().slerp(lambda, b.rotation.quaternion()));
    out.poses.push_back(p);
  }
  return out;
}

std::vector<double> uniform_grid(std::size_t n, double lo, double hi) {
  if (n < 2) {
    throw Error(ErrorCode::kInvalidInput, "grid needs at least 2 points");
  }
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) {
    grid[k] = lo + (hi - lo) * static_cast<double>(k) /
                       static_cast<double>(n - 1);
  }
  grid.back() = hi;
  return grid;
}

}  // namespace gplfd
