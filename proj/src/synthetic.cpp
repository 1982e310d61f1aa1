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

#include "gplfd/synthetic.hpp"

#include <cmath>
#include <random>

#include "gplfd/error.hpp"

namespace gplfd {

namespace {

double Uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double Gaussian(std::mt19937_64& rng) {
  double u = Uniform(rng);
  while (u <= 0.0) u = Uniform(rng);
  const double v = Uniform(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

double Smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

struct Timing {
  double duration;
  int samples;
  double exponent;
};

Timing DrawTiming(std::mt19937_64& rng) {
  Timing t;
  t.exponent = 0.7 + 0.7 * Uniform(rng);
  t.duration = 3.0 + 2.0 * Uniform(rng);
  t.samples = 80 + static_cast<int>(std::floor(61.0 * Uniform(rng)));
  return t;
}

template <typename Shape>
Trajectory Build(std::mt19937_64& rng, double noise, Shape shape) {
  const Timing timing = DrawTiming(rng);
  Trajectory traj;
  for (int i = 0; i < timing.samples; ++i) {
    const double s = static_cast<double>(i) / (timing.samples - 1);
    const double g = Smoothstep(std::pow(s, timing.exponent));
    Pose pose = shape(g);
    if (noise > 0.0) {
      for (int a = 0; a < 3; ++a) pose.position[a] += noise * Gaussian(rng);
    }
    traj.stamps.push_back(s * timing.duration);
    traj.poses.push_back(pose);
  }
  return traj;
}

void CheckCommon(int repeats, double noise) {
  if (repeats < 1) throw Error(ErrorCode::kInvalidInput, "repeats must be at least 1");
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw Error(ErrorCode::kInvalidInput, "noise must be finite and non-negative");
  }
}

}  // namespace

std::vector<Trajectory> generate_synthetic_door_set(std::uint64_t seed,
                                                    const std::vector<double>& radii,
                                                    int repeats, double noise) {
  CheckCommon(repeats, noise);
  if (radii.empty()) throw Error(ErrorCode::kInvalidInput, "need at least one radius");
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::kInvalidInput, "radii must be positive");
  }
  std::mt19937_64 rng(seed);
  std::vector<Trajectory> out;
  for (double r : radii) {
    for (int k = 0; k < repeats; ++k) {
      out.push_back(Build(rng, noise, [r](double g) {
        const double phi = 0.5 * M_PI * g;
        Pose p;
        p.position = Eigen::Vector3d(r * std::sin(phi), 0.0, r * (std::cos(phi) - 1.0));
        p.rotation = RotationVector::FromVector(Eigen::Vector3d(0.0, phi, 0.0));
        return p;
      }));
    }
  }
  return out;
}

std::vector<Trajectory> generate_shelf_set(std::uint64_t seed,
                                           const std::vector<double>& heights,
                                           int repeats, double noise) {
  CheckCommon(repeats, noise);
  if (heights.empty()) throw Error(ErrorCode::kInvalidInput, "need at least one height");
  for (double h : heights) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::kInvalidInput, "heights must be positive");
  }
  std::mt19937_64 rng(seed);
  std::vector<Trajectory> out;
  for (double h : heights) {
    for (int k = 0; k < repeats; ++k) {
      out.push_back(Build(rng, noise, [h](double g) {
        Pose p;
        p.position = Eigen::Vector3d(0.1 * g, 0.0, h * g);
        return p;
      }));
    }
  }
  return out;
}

}  // namespace gplfd
