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

// File formats: demonstration files, columnar tables, simulation traces,
// policy serialization and the run manifest.
#ifndef GPLFD_IO_HPP_
#define GPLFD_IO_HPP_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gplfd/admittance.hpp"
#include "gplfd/alignment.hpp"
#include "gplfd/policy.hpp"

namespace gplfd {

inline constexpr const char* kDemoFormatTag = "gplfd-demo v1";
inline constexpr const char* kPolicyFormatTag = "gplfd-policy v1";
inline constexpr const char* kVersion = "0.1.0";

enum class QuaternionOrder { kWxyz, kXyzw };

struct DemoHeader {
  std::string frame = "task";
  QuaternionOrder order = QuaternionOrder::kWxyz;
};

struct DemoFile {
  DemoHeader header;
  Trajectory trajectory;
};

// Throws ParseError (with a 1-based line number) on malformed rows, non-unit
// quaternions or non-increasing time, and kFormat on a bad header.
DemoFile parse_demonstration(std::istream& in, const std::string& name);
void write_demonstration(std::ostream& out, const Trajectory& traj,
                         const DemoHeader& header = {});

// Throws kFormat when the files disagree on frame or quaternion order.
std::vector<Trajectory> load_demonstrations(const std::vector<std::string>& paths);
void save_demonstration(const std::string& path, const Trajectory& traj,
                        const DemoHeader& header = {});

using TableMetadata = std::vector<std::pair<std::string, std::string>>;

// '#'-prefixed "key: value" lines, a header row, then %.17g values.
void write_table(std::ostream& out, const TableMetadata& meta,
                 const std::vector<std::string>& header, const Eigen::MatrixXd& rows);
void save_table(const std::string& path, const TableMetadata& meta,
                const std::vector<std::string>& header, const Eigen::MatrixXd& rows);

struct Table {
  TableMetadata meta;
  std::vector<std::string> header;
  Eigen::MatrixXd rows;
};
Table read_table(const std::string& path);

void save_trace(const std::string& path, const SimTrace& trace);

std::string policy_to_json(const TaskPolicy& policy);
// Refits every GP from its stored training data and hyperparameters.
TaskPolicy policy_from_json(const std::string& text);
void save_policy(const std::string& path, const TaskPolicy& policy);
TaskPolicy load_policy(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace gplfd

#endif  // GPLFD_IO_HPP_
