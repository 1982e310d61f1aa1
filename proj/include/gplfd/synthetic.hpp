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

// Synthetic demonstration sets: door-pull arcs of several radii and a
// two-level shelf placement set.
#ifndef GPLFD_SYNTHETIC_HPP_
#define GPLFD_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include "gplfd/alignment.hpp"

namespace gplfd {

// Planar arcs about a hinge at (0, 0, -R): x = R sin(phi),
// z = R (cos(phi) - 1), rotation phi about +y, phi from 0 to pi/2. Each demo
// draws its own duration, sample count and speed profile; Gaussian noise of
// standard deviation `noise` is added to the position only.
std::vector<Trajectory> generate_synthetic_door_set(std::uint64_t seed,
                                                    const std::vector<double>& radii,
                                                    int repeats, double noise);

// Straight lifts x = 0.1 g(s), z = h g(s) for every height h, with no
// rotation and the same per-demo timing randomization.
std::vector<Trajectory> generate_shelf_set(std::uint64_t seed,
                                           const std::vector<double>& heights,
                                           int repeats, double noise);

}  // namespace gplfd

#endif  // GPLFD_SYNTHETIC_HPP_
