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

#include "gplfd/config.hpp"

#include <cmath>

#include <json.hpp>

#include "gplfd/error.hpp"
#include "gplfd/io.hpp"

namespace gplfd {

namespace {

using nlohmann::json;

json Vec6(const Vector6d& v) { return json(std::vector<double>(v.data(), v.data() + 6)); }

Vector6d Vec6(const json& j, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() == 1) return Vector6d::Constant(v[0]);
  if (v.size() != 6) throw Error(ErrorCode::kInvalidInput, std::string(what) + " needs 1 or 6 values");
  return Eigen::Map<const Vector6d>(v.data());
}

Vector6d Vec6Or(const json& j, const char* what) {
  if (j.is_number()) return Vector6d::Constant(j.get<double>());
  return Vec6(j, what);
}

const char* Name(DtwMeasure m) { return m == DtwMeasure::kTci ? "tci" : "euclidean"; }
const char* Name(Integrator i) {
  return i == Integrator::kRungeKutta4 ? "rk4" : "semi_implicit_euler";
}
const char* Name(ForceKind f) {
  switch (f) {
    case ForceKind::kConstant: return "constant";
    case ForceKind::kSpring: return "spring";
    default: return "zero";
  }
}
const char* Name(DataKind k) { return k == DataKind::kShelf ? "shelf" : "door"; }

template <typename E>
E Parse(const std::string& s, std::initializer_list<E> all, const char* what) {
  for (E e : all) {
    if (s == Name(e)) return e;
  }
  throw Error(ErrorCode::kInvalidInput, std::string("unknown ") + what + " '" + s + "'");
}

json ToJsonTree(const RunConfig& c) {
  const OptConfig& o = c.learn.hetero.opt;
  const HeteroConfig& h = c.learn.hetero;
  const SimulationSettings& s = c.simulation;
  const ControllerParams& p = c.controller;
  json j;
  j["seed"] = c.seed;
  j["weights"] = {{"rotation", c.learn.weights.rotation()},
                  {"translation", c.learn.weights.translation()}};
  j["alignment"] = {{"measure", Name(c.learn.align.measure)}};
  j["policy"] = {{"grid_size", c.learn.grid_size}, {"query_points", c.query_points}};
  j["hyperparameters"] = {{"starts", o.starts},
                          {"max_iterations", o.max_iterations},
                          {"length_scale_min", o.length_scale_min},
                          {"length_scale_max_factor", o.length_scale_max_factor},
                          {"signal_std_min_factor", o.signal_std_min_factor},
                          {"signal_std_max_factor", o.signal_std_max_factor},
                          {"noise_std_min_factor", o.noise_std_min_factor},
                          {"noise_std_max_factor", o.noise_std_max_factor}};
  j["heteroscedastic"] = {{"iterations", h.iterations},
                          {"min_points", h.min_points},
                          {"smoothing_window", h.smoothing_window},
                          {"noise_floor", h.noise_floor},
                          {"reoptimize_after_noise", h.reoptimize_after_noise}};
  j["viapoints"] = {{"strength", Vec6(c.via_strength)}};
  j["controller"] = {{"mass", p.mass},
                     {"damping_ratio", p.damping_ratio},
                     {"stiffness_min", p.stiffness_min},
                     {"stiffness_max", p.stiffness_max},
                     {"alpha", p.alpha},
                     {"beta", p.beta}};
  j["simulation"] = {{"dt", s.sim.dt},
                     {"horizon", s.sim.horizon},
                     {"integrator", Name(s.sim.integrator)},
                     {"initial_error", Vec6(s.sim.initial_error)},
                     {"initial_error_rate", Vec6(s.sim.initial_error_rate)},
                     {"shared_sigma", s.shared_sigma},
                     {"force", Name(s.force)},
                     {"constant_force", Vec6(s.constant_force)},
                     {"spring_gain", s.spring_gain}};
  j["data"] = {{"kind", Name(c.data.kind)},
               {"radii", c.data.radii},
               {"heights", c.data.heights},
               {"repeats", c.data.repeats},
               {"noise", c.data.noise},
               {"truth_radius", c.data.truth_radius},
               {"truth_seed_offset", c.data.truth_seed_offset}};
  return j;
}

void CheckKnown(const json& user, const json& defaults, const std::string& prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!defaults.contains(it.key())) {
      throw Error(ErrorCode::kInvalidInput, "unknown configuration key '" + key + "'");
    }
    const json& d = defaults.at(it.key());
    if (d.is_object()) {
      if (!it.value().is_object()) {
        throw Error(ErrorCode::kInvalidInput, "configuration key '" + key + "' must be an object");
      }
      CheckKnown(it.value(), d, key);
    }
  }
}

RunConfig FromJsonTree(const json& j) {
  RunConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.learn.weights = DistanceWeights(j.at("weights").at("rotation").get<double>(),
                                    j.at("weights").at("translation").get<double>());
  c.learn.align.measure = Parse(j.at("alignment").at("measure").get<std::string>(),
                                {DtwMeasure::kTci, DtwMeasure::kEuclideanPose}, "alignment measure");
  c.learn.grid_size = j.at("policy").at("grid_size").get<int>();
  c.query_points = j.at("policy").at("query_points").get<int>();
  const json& hp = j.at("hyperparameters");
  OptConfig& o = c.learn.hetero.opt;
  o.starts = hp.at("starts").get<int>();
  o.max_iterations = hp.at("max_iterations").get<int>();
  o.length_scale_min = hp.at("length_scale_min").get<double>();
  o.length_scale_max_factor = hp.at("length_scale_max_factor").get<double>();
  o.signal_std_min_factor = hp.at("signal_std_min_factor").get<double>();
  o.signal_std_max_factor = hp.at("signal_std_max_factor").get<double>();
  o.noise_std_min_factor = hp.at("noise_std_min_factor").get<double>();
  o.noise_std_max_factor = hp.at("noise_std_max_factor").get<double>();
  const json& he = j.at("heteroscedastic");
  HeteroConfig& h = c.learn.hetero;
  h.iterations = he.at("iterations").get<int>();
  h.min_points = he.at("min_points").get<int>();
  h.smoothing_window = he.at("smoothing_window").get<int>();
  h.noise_floor = he.at("noise_floor").get<double>();
  h.reoptimize_after_noise = he.at("reoptimize_after_noise").get<bool>();
  c.via_strength = Vec6Or(j.at("viapoints").at("strength"), "viapoints.strength");
  const json& cj = j.at("controller");
  c.controller.mass = cj.at("mass").get<double>();
  c.controller.damping_ratio = cj.at("damping_ratio").get<double>();
  c.controller.stiffness_min = cj.at("stiffness_min").get<double>();
  c.controller.stiffness_max = cj.at("stiffness_max").get<double>();
  c.controller.alpha = cj.at("alpha").get<double>();
  c.controller.beta = cj.at("beta").get<double>();
  const json& sj = j.at("simulation");
  SimulationSettings& s = c.simulation;
  s.sim.dt = sj.at("dt").get<double>();
  s.sim.horizon = sj.at("horizon").get<double>();
  s.sim.integrator = Parse(sj.at("integrator").get<std::string>(),
                           {Integrator::kSemiImplicitEuler, Integrator::kRungeKutta4}, "integrator");
  s.sim.initial_error = Vec6Or(sj.at("initial_error"), "simulation.initial_error");
  s.sim.initial_error_rate = Vec6Or(sj.at("initial_error_rate"), "simulation.initial_error_rate");
  s.shared_sigma = sj.at("shared_sigma").get<bool>();
  s.force = Parse(sj.at("force").get<std::string>(),
                  {ForceKind::kZero, ForceKind::kConstant, ForceKind::kSpring}, "force model");
  s.constant_force = Vec6Or(sj.at("constant_force"), "simulation.constant_force");
  s.spring_gain = sj.at("spring_gain").get<double>();
  const json& dj = j.at("data");
  c.data.kind = Parse(dj.at("kind").get<std::string>(), {DataKind::kDoor, DataKind::kShelf}, "data kind");
  c.data.radii = dj.at("radii").get<std::vector<double>>();
  c.data.heights = dj.at("heights").get<std::vector<double>>();
  c.data.repeats = dj.at("repeats").get<int>();
  c.data.noise = dj.at("noise").get<double>();
  c.data.truth_radius = dj.at("truth_radius").get<double>();
  c.data.truth_seed_offset = dj.at("truth_seed_offset").get<std::uint64_t>();
  c.Validate();
  return c;
}

template <typename F>
auto Guard(F f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("configuration: ") + e.what());
  }
}

}  // namespace

RunConfig RunConfig::FromJson(const std::string& text) {
  return Guard([&] {
    json user;
    try {
      user = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse, std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!user.is_object()) throw Error(ErrorCode::kInvalidInput, "configuration must be a JSON object");
    if (user.contains("format") && user["format"] == kManifestFormatTag) user = user.at("config");
    json merged = ToJsonTree(RunConfig{});
    CheckKnown(user, merged, "");
    merged.merge_patch(user);
    return FromJsonTree(merged);
  });
}

RunConfig RunConfig::Load(const std::string& path) { return FromJson(read_file(path)); }

std::string RunConfig::ToJson() const { return ToJsonTree(*this).dump(); }

void RunConfig::Set(const std::string& key, const std::string& value) {
  Guard([&] {
    json tree = ToJsonTree(*this);
    json v;
    try {
      v = json::parse(value);
    } catch (const json::parse_error&) {
      v = value;
    }
    json::json_pointer ptr;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw Error(ErrorCode::kInvalidInput, "bad configuration key '" + key + "'");
      ptr /= part;
      if (!tree.contains(ptr)) {
        throw Error(ErrorCode::kInvalidInput, "unknown configuration key '" + key + "'");
      }
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    if (tree.at(ptr).is_object()) {
      throw Error(ErrorCode::kInvalidInput, "configuration key '" + key + "' names a section");
    }
    tree[ptr] = v;
    *this = FromJsonTree(tree);
    return 0;
  });
}

LearnConfig RunConfig::Learning() const {
  LearnConfig l = learn;
  l.hetero.opt.seed = seed;
  return l;
}

std::uint64_t RunConfig::Hash() const { return fnv1a64(ToJson()); }

void RunConfig::Validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidInput, std::string("configuration: ") + what);
  };
  need(learn.grid_size >= 2, "policy.grid_size must be >= 2");
  need(query_points >= 2, "policy.query_points must be >= 2");
  const OptConfig& o = learn.hetero.opt;
  need(o.starts >= 1, "hyperparameters.starts must be >= 1");
  need(o.max_iterations >= 1, "hyperparameters.max_iterations must be >= 1");
  need(o.length_scale_min > 0.0 && o.length_scale_max_factor > 0.0,
       "hyperparameters length-scale bounds must be positive");
  need(o.signal_std_min_factor > 0.0 && o.signal_std_max_factor >= o.signal_std_min_factor,
       "hyperparameters signal bounds must satisfy 0 < min <= max");
  need(o.noise_std_min_factor > 0.0 && o.noise_std_max_factor >= o.noise_std_min_factor,
       "hyperparameters noise bounds must satisfy 0 < min <= max");
  const HeteroConfig& h = learn.hetero;
  need(h.iterations >= 1, "heteroscedastic.iterations must be >= 1");
  need(h.min_points >= 1, "heteroscedastic.min_points must be >= 1");
  need(h.smoothing_window >= 1, "heteroscedastic.smoothing_window must be >= 1");
  need(h.noise_floor > 0.0, "heteroscedastic.noise_floor must be positive");
  need(via_strength.allFinite() && (via_strength.array() >= 0.0).all(),
       "viapoints.strength must be finite and >= 0");
  controller.Validate();
  need(simulation.sim.dt > 0.0 && simulation.sim.horizon >= simulation.sim.dt &&
           std::isfinite(simulation.sim.horizon),
       "simulation needs dt > 0 and horizon >= dt");
  need(simulation.sim.initial_error.allFinite() && simulation.sim.initial_error_rate.allFinite() &&
           simulation.constant_force.allFinite() && std::isfinite(simulation.spring_gain),
       "simulation vectors must be finite");
  need(data.repeats >= 1, "data.repeats must be >= 1");
  need(data.noise >= 0.0 && std::isfinite(data.noise), "data.noise must be >= 0");
  need(!data.radii.empty() && !data.heights.empty(), "data.radii and data.heights must be non-empty");
  for (double r : data.radii) need(r > 0.0 && std::isfinite(r), "data.radii must be positive");
  for (double r : data.heights) need(r > 0.0 && std::isfinite(r), "data.heights must be positive");
  need(data.truth_radius > 0.0 && std::isfinite(data.truth_radius), "data.truth_radius must be positive");
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& arguments, const RunConfig& config,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  auto files = [](const std::vector<std::string>& paths) {
    json out = json::array();
    for (const std::string& p : paths) out.push_back({{"path", p}, {"fnv1a64", hex64(fnv1a64(read_file(p)))}});
    return out;
  };
  json m;
  m["format"] = kManifestFormatTag;
  m["command"] = command;
  m["arguments"] = arguments;
  m["version"] = kVersion;
  m["build"] = {{"compiler", __VERSION__},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                              "." + std::to_string(EIGEN_MINOR_VERSION)}};
  m["seed"] = config.seed;
  m["config_hash"] = hex64(config.Hash());
  m["config"] = ToJsonTree(config);
  m["inputs"] = files(inputs);
  m["outputs"] = files(outputs);
  write_file(path, m.dump(1) + "\n");
}

}  // namespace gplfd
