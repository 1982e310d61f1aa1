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

#include "gplfd/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gplfd/error.hpp"

namespace gplfd {

namespace {

using nlohmann::json;

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitComma(const std::string& s) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, ',')) out.push_back(Trim(field));
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

bool ParseDouble(const std::string& s, double* out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return false;
  *out = v;
  return true;
}

std::string Fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json VectorJson(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd JsonVector(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json GpJson(const GPModel& m) {
  json j;
  j["t"] = VectorJson(m.train().t);
  j["y"] = VectorJson(m.train().y);
  j["length_scale"] = m.params().length_scale;
  j["signal_std"] = m.params().signal_std;
  if (m.noise().is_constant()) {
    j["noise"] = m.noise().constant();
  } else {
    j["noise"] = VectorJson(m.noise().Expand(m.train().size()));
  }
  j["prior_mean"] = m.prior_mean();
  return j;
}

GPModel JsonGp(const json& j) {
  TrainingSet train{JsonVector(j.at("t")), JsonVector(j.at("y"))};
  KernelParams params{j.at("length_scale").get<double>(), j.at("signal_std").get<double>()};
  const json& nj = j.at("noise");
  const Noise noise = nj.is_array() ? Noise::PerPoint(JsonVector(nj))
                                    : Noise::Constant(nj.get<double>());
  return GPModel::Fit(train, params, noise, j.at("prior_mean").get<double>());
}

json TrajectoryJson(const Trajectory& traj) {
  json poses = json::array();
  for (const Pose& p : traj.poses) {
    const Vector6d v = p.ToVector();
    poses.push_back(std::vector<double>(v.data(), v.data() + 6));
  }
  return json{{"t", traj.stamps}, {"poses", poses}};
}

Trajectory JsonTrajectory(const json& j) {
  Trajectory traj;
  traj.stamps = j.at("t").get<std::vector<double>>();
  for (const auto& row : j.at("poses")) {
    const auto v = row.get<std::vector<double>>();
    if (v.size() != 6) throw Error(ErrorCode::kFormat, "pose rows need six values");
    traj.poses.push_back(Pose::FromVector(Eigen::Map<const Vector6d>(v.data())));
  }
  traj.Validate();
  return traj;
}

}  // namespace

DemoFile parse_demonstration(std::istream& in, const std::string& name) {
  DemoFile file;
  std::string line;
  std::size_t lineno = 0;
  bool tagged = false;
  bool header_row = false;
  bool has_frame = false;
  bool has_order = false;
  auto fail = [&](const std::string& why) {
    throw ParseError(lineno, name + ":" + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = Trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const std::string body = Trim(s.substr(1));
      if (body == kDemoFormatTag) {
        tagged = true;
        continue;
      }
      const auto colon = body.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = Trim(body.substr(0, colon));
      const std::string value = Trim(body.substr(colon + 1));
      if (key == "frame") {
        file.header.frame = value;
        has_frame = true;
      } else if (key == "quaternion") {
        if (value == "wxyz") {
          file.header.order = QuaternionOrder::kWxyz;
        } else if (value == "xyzw") {
          file.header.order = QuaternionOrder::kXyzw;
        } else {
          throw Error(ErrorCode::kFormat, name + ": unknown quaternion order '" + value + "'");
        }
        has_order = true;
      }
      continue;
    }
    if (!tagged) {
      throw Error(ErrorCode::kFormat, name + ": missing '# " + std::string(kDemoFormatTag) + "' header");
    }
    const auto fields = SplitComma(s);
    if (!header_row) {
      header_row = true;
      double probe = 0.0;
      if (!fields.empty() && !ParseDouble(fields[0], &probe)) continue;
    }
    if (fields.size() != 8) fail("expected 8 comma-separated values");
    double v[8];
    for (int i = 0; i < 8; ++i) {
      if (!ParseDouble(fields[static_cast<std::size_t>(i)], &v[i]) || !std::isfinite(v[i])) {
        fail("field " + std::to_string(i + 1) + " is not a finite number");
      }
    }
    double qw = v[4], qx = v[5], qy = v[6], qz = v[7];
    if (file.header.order == QuaternionOrder::kXyzw) {
      qx = v[4];
      qy = v[5];
      qz = v[6];
      qw = v[7];
    }
    const double norm = std::sqrt(qw * qw + qx * qx + qy * qy + qz * qz);
    if (std::abs(norm - 1.0) > kUnitQuaternionTolerance) {
      fail("quaternion norm " + Fmt(norm) + " is not 1");
    }
    if (!file.trajectory.stamps.empty() && !(v[0] > file.trajectory.stamps.back())) {
      fail("time stamps must strictly increase");
    }
    Pose pose;
    pose.position = Eigen::Vector3d(v[1], v[2], v[3]);
    pose.rotation = rotvec_from_quaternion(qw / norm, qx / norm, qy / norm, qz / norm);
    file.trajectory.stamps.push_back(v[0]);
    file.trajectory.poses.push_back(pose);
  }
  if (!tagged) {
    throw Error(ErrorCode::kFormat, name + ": missing '# " + std::string(kDemoFormatTag) + "' header");
  }
  if (!has_frame || !has_order) {
    throw Error(ErrorCode::kFormat, name + ": header needs 'frame' and 'quaternion' entries");
  }
  try {
    file.trajectory.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidInput, name + ": " + e.what());
  }
  return file;
}

void write_demonstration(std::ostream& out, const Trajectory& traj,
                         const DemoHeader& header) {
  traj.Validate();
  const bool wxyz = header.order == QuaternionOrder::kWxyz;
  out << "# " << kDemoFormatTag << "\n";
  out << "# frame: " << header.frame << "\n";
  out << "# quaternion: " << (wxyz ? "wxyz" : "xyzw") << "\n";
  out << (wxyz ? "t,x,y,z,qw,qx,qy,qz\n" : "t,x,y,z,qx,qy,qz,qw\n");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Pose& p = traj.poses[i];
    const Eigen::Quaterniond q = quaternion_of(p.rotation);
    out << Fmt(traj.stamps[i]) << ',' << Fmt(p.position.x()) << ','
        << Fmt(p.position.y()) << ',' << Fmt(p.position.z()) << ',';
    if (wxyz) {
      out << Fmt(q.w()) << ',' << Fmt(q.x()) << ',' << Fmt(q.y()) << ',' << Fmt(q.z());
    } else {
      out << Fmt(q.x()) << ',' << Fmt(q.y()) << ',' << Fmt(q.z()) << ',' << Fmt(q.w());
    }
    out << '\n';
  }
}

std::vector<Trajectory> load_demonstrations(const std::vector<std::string>& paths) {
  if (paths.empty()) throw Error(ErrorCode::kInvalidInput, "no demonstration files given");
  std::vector<Trajectory> out;
  DemoHeader first;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::istringstream in(read_file(paths[i]));
    DemoFile f = parse_demonstration(in, paths[i]);
    if (i == 0) {
      first = f.header;
    } else if (f.header.frame != first.frame || f.header.order != first.order) {
      throw Error(ErrorCode::kFormat, paths[i] + ": frame or quaternion order differs from " + paths[0]);
    }
    out.push_back(std::move(f.trajectory));
  }
  return out;
}

void save_demonstration(const std::string& path, const Trajectory& traj,
                        const DemoHeader& header) {
  std::ostringstream out;
  write_demonstration(out, traj, header);
  write_file(path, out.str());
}

void write_table(std::ostream& out, const TableMetadata& meta,
                 const std::vector<std::string>& header, const Eigen::MatrixXd& rows) {
  if (static_cast<Eigen::Index>(header.size()) != rows.cols()) {
    throw Error(ErrorCode::kInvalidInput, "table header and column count differ");
  }
  for (const auto& [k, v] : meta) out << "# " << k << ": " << v << "\n";
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << "\n";
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) out << (c ? "," : "") << Fmt(rows(r, c));
    out << "\n";
  }
}

void save_table(const std::string& path, const TableMetadata& meta,
                const std::vector<std::string>& header, const Eigen::MatrixXd& rows) {
  std::ostringstream out;
  write_table(out, meta, header, rows);
  write_file(path, out.str());
}

Table read_table(const std::string& path) {
  std::istringstream in(read_file(path));
  Table table;
  std::vector<std::vector<double>> data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = Trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const std::string body = Trim(s.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string::npos) {
        table.meta.emplace_back(Trim(body.substr(0, colon)), Trim(body.substr(colon + 1)));
      }
      continue;
    }
    const auto fields = SplitComma(s);
    if (table.header.empty()) {
      table.header = fields;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ParseError(lineno, path + ":" + std::to_string(lineno) + ": wrong column count");
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!ParseDouble(fields[i], &row[i])) {
        throw ParseError(lineno, path + ":" + std::to_string(lineno) + ": bad number '" + fields[i] + "'");
      }
    }
    data.push_back(std::move(row));
  }
  table.rows.resize(static_cast<Eigen::Index>(data.size()),
                    static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < data[r].size(); ++c) {
      table.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r][c];
    }
  }
  return table;
}

void save_trace(const std::string& path, const SimTrace& trace) {
  const char* axes[6] = {"x", "y", "z", "rx", "ry", "rz"};
  const std::pair<const char*, const TraceMatrix*> blocks[] = {
      {"e", &trace.error},         {"edot", &trace.error_rate}, {"k", &trace.stiffness},
      {"d", &trace.damping},       {"f", &trace.force},         {"sigma", &trace.sigma},
      {"sigma_rate", &trace.sigma_rate}};
  std::vector<std::string> header{"t"};
  for (const auto& [name, m] : blocks) {
    for (const char* a : axes) header.push_back(std::string(name) + "_" + a);
  }
  header.emplace_back("energy");
  const auto n = static_cast<Eigen::Index>(trace.size());
  Eigen::MatrixXd rows(n, static_cast<Eigen::Index>(header.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    rows(i, 0) = trace.time[static_cast<std::size_t>(i)];
    Eigen::Index c = 1;
    for (const auto& [name, m] : blocks) {
      rows.block(i, c, 1, 6) = m->row(i);
      c += 6;
    }
    rows(i, c) = trace.energy[static_cast<std::size_t>(i)];
  }
  const StabilityReport& s = trace.stability;
  const TableMetadata meta{{"format", "gplfd-trace v1"},
                           {"gamma", Fmt(s.gamma)},
                           {"sigma_rate_bound", Fmt(s.sigma_rate_bound)},
                           {"observed_max_sigma_rate", Fmt(s.observed_max_sigma_rate)},
                           {"stability_satisfied", s.satisfied ? "true" : "false"}};
  save_table(path, meta, header, rows);
}

std::string policy_to_json(const TaskPolicy& policy) {
  json j;
  j["format"] = kPolicyFormatTag;
  j["weights"] = {{"rotation", policy.weights().rotation()},
                  {"translation", policy.weights().translation()}};
  j["grid"] = policy.grid();
  j["reference"] = TrajectoryJson(policy.reference());
  json dims = json::array();
  for (const HeteroGPModel& m : policy.dimensions()) {
    dims.push_back({{"signal", GpJson(m.signal)},
                    {"noise", GpJson(m.noise)},
                    {"degenerate_noise", m.degenerate_noise},
                    {"noise_floor", m.noise_floor}});
  }
  j["dimensions"] = dims;
  return j.dump(1) + "\n";
}

TaskPolicy policy_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kPolicyFormatTag) {
      throw Error(ErrorCode::kFormat, "not a " + std::string(kPolicyFormatTag) + " document");
    }
    const DistanceWeights w(j.at("weights").at("rotation").get<double>(),
                            j.at("weights").at("translation").get<double>());
    const json& dj = j.at("dimensions");
    if (!dj.is_array() || dj.size() != kPoseDims) {
      throw Error(ErrorCode::kFormat, "policy needs six dimensions");
    }
    std::array<HeteroGPModel, kPoseDims> dims;
    for (int d = 0; d < kPoseDims; ++d) {
      const json& e = dj[static_cast<std::size_t>(d)];
      dims[static_cast<std::size_t>(d)].signal = JsonGp(e.at("signal"));
      dims[static_cast<std::size_t>(d)].noise = JsonGp(e.at("noise"));
      dims[static_cast<std::size_t>(d)].degenerate_noise = e.at("degenerate_noise").get<bool>();
      dims[static_cast<std::size_t>(d)].noise_floor = e.at("noise_floor").get<double>();
    }
    return TaskPolicy(std::move(dims), JsonTrajectory(j.at("reference")), w,
                      j.at("grid").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed policy: ") + e.what());
  }
}

void save_policy(const std::string& path, const TaskPolicy& policy) {
  write_file(path, policy_to_json(policy));
}

TaskPolicy load_policy(const std::string& path) {
  return policy_from_json(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace gplfd
