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

// Declarative run configuration with full defaulting, dotted-key overrides,
// validation against each module's preconditions, and a content hash.
#ifndef GPLFD_CONFIG_HPP_
#define GPLFD_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "gplfd/admittance.hpp"
#include "gplfd/policy.hpp"

namespace gplfd {

enum class ForceKind { kZero, kConstant, kSpring };
enum class DataKind { kDoor, kShelf };

struct SimulationSettings {
  SimConfig sim;
  bool shared_sigma = false;
  ForceKind force = ForceKind::kZero;
  Vector6d constant_force = Vector6d::Zero();
  double spring_gain = 50.0;
};

struct DataSettings {
  DataKind kind = DataKind::kDoor;
  std::vector<double> radii{0.7, 0.8, 0.9};
  std::vector<double> heights{0.3, 0.6};
  int repeats = 2;
  double noise = 1e-3;
  double truth_radius = 0.85;
  std::uint64_t truth_seed_offset = 7919;
};

struct RunConfig {
  std::uint64_t seed = 1;
  LearnConfig learn;
  Vector6d via_strength = Vector6d::Constant(1e-4);
  ControllerParams controller;
  SimulationSettings simulation;
  DataSettings data;
  int query_points = 101;

  // Missing fields keep their defaults; unknown keys are rejected.
  // Also accepts a run manifest, whose embedded configuration is used.
  static RunConfig FromJson(const std::string& text);
  static RunConfig Load(const std::string& path);
  // Canonical JSON (sorted keys, full precision).
  std::string ToJson() const;
  // Dotted key ("controller.alpha") and a JSON value; a value that does not
  // parse as JSON is taken as a string.
  void Set(const std::string& key, const std::string& value);
  std::uint64_t Hash() const;
  void Validate() const;
  // Learning settings with the optimizer seeded from `seed`.
  LearnConfig Learning() const;
};

inline constexpr const char* kManifestFormatTag = "gplfd-manifest v1";

// Run manifest: command, arguments, version, configuration and its hash, and
// content hashes of every input and output file.
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& arguments, const RunConfig& config,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs);

}  // namespace gplfd

#endif  // GPLFD_CONFIG_HPP_
