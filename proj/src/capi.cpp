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

#include "gplfd/gplfd.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "gplfd/admittance.hpp"
#include "gplfd/config.hpp"
#include "gplfd/error.hpp"
#include "gplfd/io.hpp"
#include "gplfd/policy.hpp"
#include "gplfd/synthetic.hpp"

struct gplfd_config {
  gplfd::RunConfig config;
};

struct gplfd_demo_set {
  std::vector<gplfd::Trajectory> demos;
};

struct gplfd_policy {
  gplfd::TaskPolicy policy;
};

struct gplfd_sim_trace {
  gplfd::SimTrace trace;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
gplfd_status Guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return GPLFD_OK;
  } catch (const gplfd::Error& e) {
    g_last_error = e.what();
    return static_cast<gplfd_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GPLFD_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GPLFD_INTERNAL;
  }
}

void Need(const void* p, const char* what) {
  if (p == nullptr) {
    throw gplfd::Error(gplfd::ErrorCode::kInvalidInput, std::string(what) + " must not be NULL");
  }
}

const gplfd::Trajectory& At(const gplfd_demo_set* set, std::size_t index) {
  Need(set, "demo set");
  if (index >= set->demos.size()) {
    throw gplfd::Error(gplfd::ErrorCode::kInvalidInput,
                       "demonstration index " + std::to_string(index) + " out of range");
  }
  return set->demos[index];
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> Strings(const char* const* items, std::size_t count, const char* what) {
  if (count > 0) Need(items, what);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    Need(items[i], what);
    out.emplace_back(items[i]);
  }
  return out;
}

void CopyOut(const std::vector<gplfd::PoseDistribution>& q, double* mean, double* var) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (int d = 0; d < 6; ++d) {
      if (mean != nullptr) mean[6 * i + static_cast<std::size_t>(d)] = q[i].mean[d];
      if (var != nullptr) var[6 * i + static_cast<std::size_t>(d)] = q[i].var[d];
    }
  }
}

gplfd_stability ToC(const gplfd::StabilityReport& r) {
  return gplfd_stability{r.gamma, r.sigma_rate_bound, r.observed_max_sigma_rate, r.satisfied ? 1 : 0};
}

void SaveSteps(const std::string& path, const gplfd::StreamingEvaluation& ev) {
  const char* axes[6] = {"x", "y", "z", "rx", "ry", "rz"};
  std::vector<std::string> header{"t"};
  for (const char* block : {"truth", "static_mean", "static_var", "adaptive_mean", "adaptive_var"}) {
    for (const char* a : axes) header.push_back(std::string(block) + "_" + a);
  }
  const auto n = static_cast<Eigen::Index>(ev.times.size());
  Eigen::MatrixXd rows(n, static_cast<Eigen::Index>(header.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    rows(i, 0) = ev.times[k];
    rows.block(i, 1, 1, 6) = ev.truth.poses[k + 1].ToVector().transpose();
    rows.block(i, 7, 1, 6) = ev.static_prediction[k].mean.transpose();
    rows.block(i, 13, 1, 6) = ev.static_prediction[k].var.transpose();
    rows.block(i, 19, 1, 6) = ev.adaptive_prediction[k].mean.transpose();
    rows.block(i, 25, 1, 6) = ev.adaptive_prediction[k].var.transpose();
  }
  gplfd::save_table(path, {{"format", "gplfd-eval-steps v1"}}, header, rows);
}

}  // namespace

extern "C" {

const char* gplfd_version(void) { return gplfd::kVersion; }

const char* gplfd_last_error(void) { return g_last_error.c_str(); }

const char* gplfd_status_name(gplfd_status status) {
  switch (status) {
    case GPLFD_OK: return "ok";
    case GPLFD_INVALID_INPUT: return "invalid input";
    case GPLFD_NUMERICAL_CONDITIONING: return "numerical conditioning";
    case GPLFD_STATE: return "invalid state";
    case GPLFD_OPTIMIZATION_FAILURE: return "optimization failure";
    case GPLFD_DEGENERATE_TRAJECTORY: return "degenerate trajectory";
    case GPLFD_INSUFFICIENT_DATA: return "insufficient data";
    case GPLFD_INCONSISTENT_CONSTRAINT: return "inconsistent constraint";
    case GPLFD_DIVERGENCE: return "divergence";
    case GPLFD_PARSE: return "parse error";
    case GPLFD_FORMAT: return "format error";
    case GPLFD_IO: return "i/o error";
    default: return "internal error";
  }
}

void gplfd_string_free(char* s) { std::free(s); }

gplfd_status gplfd_config_create(gplfd_config** out) {
  return Guard([&] {
    Need(out, "out");
    *out = new gplfd_config{};
  });
}

gplfd_status gplfd_config_load(const char* path, gplfd_config** out) {
  return Guard([&] {
    Need(path, "path");
    Need(out, "out");
    *out = new gplfd_config{gplfd::RunConfig::Load(path)};
  });
}

gplfd_status gplfd_config_set(gplfd_config* config, const char* key, const char* value) {
  return Guard([&] {
    Need(config, "config");
    Need(key, "key");
    Need(value, "value");
    config->config.Set(key, value);
  });
}

gplfd_status gplfd_config_to_json(const gplfd_config* config, char** out) {
  return Guard([&] {
    Need(config, "config");
    Need(out, "out");
    *out = CopyString(config->config.ToJson());
  });
}

gplfd_status gplfd_config_hash(const gplfd_config* config, uint64_t* out) {
  return Guard([&] {
    Need(config, "config");
    Need(out, "out");
    *out = config->config.Hash();
  });
}

void gplfd_config_destroy(gplfd_config* config) { delete config; }

gplfd_status gplfd_demo_set_load(const char* const* paths, size_t count, gplfd_demo_set** out) {
  return Guard([&] {
    Need(out, "out");
    auto set = std::make_unique<gplfd_demo_set>();
    set->demos = gplfd::load_demonstrations(Strings(paths, count, "paths"));
    *out = set.release();
  });
}

gplfd_status gplfd_demo_set_generate(const gplfd_config* config, gplfd_demo_set** demos,
                                     gplfd_demo_set** truth) {
  return Guard([&] {
    Need(config, "config");
    Need(demos, "demos");
    const gplfd::RunConfig& c = config->config;
    const gplfd::DataSettings& d = c.data;
    auto set = std::make_unique<gplfd_demo_set>();
    auto held = std::make_unique<gplfd_demo_set>();
    const std::uint64_t truth_seed = c.seed + d.truth_seed_offset;
    if (d.kind == gplfd::DataKind::kDoor) {
      set->demos = gplfd::generate_synthetic_door_set(c.seed, d.radii, d.repeats, d.noise);
      held->demos = gplfd::generate_synthetic_door_set(truth_seed, {d.truth_radius}, 1, d.noise);
    } else {
      set->demos = gplfd::generate_shelf_set(c.seed, d.heights, d.repeats, d.noise);
      held->demos = gplfd::generate_shelf_set(truth_seed, {d.heights.front()}, 1, d.noise);
    }
    *demos = set.release();
    if (truth != nullptr) *truth = held.release();
  });
}

gplfd_status gplfd_demo_set_count(const gplfd_demo_set* set, size_t* out) {
  return Guard([&] {
    Need(set, "demo set");
    Need(out, "out");
    *out = set->demos.size();
  });
}

gplfd_status gplfd_demo_set_length(const gplfd_demo_set* set, size_t index, size_t* out) {
  return Guard([&] {
    Need(out, "out");
    *out = At(set, index).size();
  });
}

gplfd_status gplfd_demo_set_get(const gplfd_demo_set* set, size_t index, double* stamps,
                                double* poses) {
  return Guard([&] {
    const gplfd::Trajectory& t = At(set, index);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (stamps != nullptr) stamps[i] = t.stamps[i];
      if (poses != nullptr) {
        const gplfd::Vector6d v = t.poses[i].ToVector();
        for (int d = 0; d < 6; ++d) poses[6 * i + static_cast<std::size_t>(d)] = v[d];
      }
    }
  });
}

gplfd_status gplfd_demo_set_save(const gplfd_demo_set* set, size_t index, const char* path) {
  return Guard([&] {
    Need(path, "path");
    gplfd::save_demonstration(path, At(set, index));
  });
}

gplfd_status gplfd_demo_set_align(const gplfd_demo_set* set, const gplfd_config* config,
                                  gplfd_demo_set** out, size_t* reference) {
  return Guard([&] {
    Need(set, "demo set");
    Need(config, "config");
    Need(out, "out");
    const gplfd::LearnConfig& lc = config->config.learn;
    gplfd::AlignmentResult r = gplfd::align_demonstrations(set->demos, lc.weights, lc.align);
    auto aligned = std::make_unique<gplfd_demo_set>();
    aligned->demos = std::move(r.aligned);
    if (reference != nullptr) *reference = r.reference;
    *out = aligned.release();
  });
}

void gplfd_demo_set_destroy(gplfd_demo_set* set) { delete set; }

gplfd_status gplfd_policy_learn(const gplfd_demo_set* demos, const gplfd_config* config,
                                gplfd_policy** out) {
  return Guard([&] {
    Need(demos, "demo set");
    Need(config, "config");
    Need(out, "out");
    *out = new gplfd_policy{gplfd::learn_policy(demos->demos, config->config.Learning())};
  });
}

gplfd_status gplfd_policy_load(const char* path, gplfd_policy** out) {
  return Guard([&] {
    Need(path, "path");
    Need(out, "out");
    *out = new gplfd_policy{gplfd::load_policy(path)};
  });
}

gplfd_status gplfd_policy_save(const gplfd_policy* policy, const char* path) {
  return Guard([&] {
    Need(policy, "policy");
    Need(path, "path");
    gplfd::save_policy(path, policy->policy);
  });
}

gplfd_status gplfd_policy_query(const gplfd_policy* policy, const double* t, size_t count,
                                double* mean, double* var) {
  return Guard([&] {
    Need(policy, "policy");
    if (count > 0) Need(t, "t");
    CopyOut(policy->policy.Query(std::vector<double>(t, t + count)), mean, var);
  });
}

gplfd_status gplfd_policy_adapt(const gplfd_policy* policy, const gplfd_via_point* via,
                                size_t via_count, const double* t, size_t count, double* mean,
                                double* var) {
  return Guard([&] {
    Need(policy, "policy");
    if (via_count > 0) Need(via, "via");
    if (count > 0) Need(t, "t");
    std::vector<gplfd::ViaPoint> vps;
    for (std::size_t i = 0; i < via_count; ++i) {
      gplfd::ViaPoint v;
      v.t = via[i].t;
      v.pose = gplfd::Pose::FromVector(Eigen::Map<const gplfd::Vector6d>(via[i].pose));
      v.strength = Eigen::Map<const gplfd::Vector6d>(via[i].strength);
      vps.push_back(v);
    }
    CopyOut(gplfd::adapt_with_viapoints(policy->policy, vps, std::vector<double>(t, t + count)),
            mean, var);
  });
}

gplfd_status gplfd_policy_evaluate_streaming(const gplfd_policy* policy, const gplfd_demo_set* truth,
                                             size_t index, const gplfd_config* config,
                                             gplfd_eval_summary* out, const char* steps_path) {
  return Guard([&] {
    Need(policy, "policy");
    Need(config, "config");
    Need(out, "out");
    const gplfd::StreamingEvaluation ev =
        gplfd::evaluate_streaming(policy->policy, At(truth, index), config->config.via_strength);
    for (int d = 0; d < 6; ++d) {
      out->static_mse[d] = ev.static_mse[d];
      out->adaptive_mse[d] = ev.adaptive_mse[d];
    }
    out->steps = ev.times.size();
    if (steps_path != nullptr) SaveSteps(steps_path, ev);
  });
}

void gplfd_policy_destroy(gplfd_policy* policy) { delete policy; }

gplfd_status gplfd_simulate_policy(const gplfd_policy* policy, const gplfd_demo_set* truth,
                                   size_t index, const gplfd_config* config, gplfd_sim_trace** out) {
  return Guard([&] {
    Need(policy, "policy");
    Need(config, "config");
    Need(out, "out");
    const gplfd::SimulationSettings& s = config->config.simulation;
    const gplfd::PolicySetpoint source(policy->policy, s.sim.horizon, s.shared_sigma);
    std::unique_ptr<gplfd::ForceModel> env;
    switch (s.force) {
      case gplfd::ForceKind::kZero:
        env = std::make_unique<gplfd::ZeroForce>();
        break;
      case gplfd::ForceKind::kConstant:
        env = std::make_unique<gplfd::ConstantForce>(s.constant_force);
        break;
      case gplfd::ForceKind::kSpring:
        if (truth == nullptr) {
          throw gplfd::Error(gplfd::ErrorCode::kInvalidInput,
                             "the spring force model needs a ground-truth trajectory");
        }
        env = std::make_unique<gplfd::SpringToTruth>(At(truth, index), s.spring_gain, s.sim.horizon);
        break;
    }
    *out = new gplfd_sim_trace{gplfd::simulate(source, *env, config->config.controller, s.sim)};
  });
}

gplfd_status gplfd_sim_trace_length(const gplfd_sim_trace* trace, size_t* out) {
  return Guard([&] {
    Need(trace, "trace");
    Need(out, "out");
    *out = trace->trace.size();
  });
}

gplfd_status gplfd_sim_trace_column(const gplfd_sim_trace* trace, const char* name, size_t axis,
                                    double* out) {
  return Guard([&] {
    Need(trace, "trace");
    Need(name, "name");
    Need(out, "out");
    const gplfd::SimTrace& t = trace->trace;
    const std::string n(name);
    if (n == "time" || n == "energy") {
      const std::vector<double>& v = n == "time" ? t.time : t.energy;
      std::copy(v.begin(), v.end(), out);
      return;
    }
    const gplfd::TraceMatrix* m = nullptr;
    if (n == "error") m = &t.error;
    else if (n == "error_rate") m = &t.error_rate;
    else if (n == "stiffness") m = &t.stiffness;
    else if (n == "damping") m = &t.damping;
    else if (n == "force") m = &t.force;
    else if (n == "sigma") m = &t.sigma;
    else if (n == "sigma_rate") m = &t.sigma_rate;
    if (m == nullptr) throw gplfd::Error(gplfd::ErrorCode::kInvalidInput, "unknown trace column '" + n + "'");
    if (axis >= 6) throw gplfd::Error(gplfd::ErrorCode::kInvalidInput, "axis must be in 0..5");
    for (Eigen::Index i = 0; i < m->rows(); ++i) out[i] = (*m)(i, static_cast<Eigen::Index>(axis));
  });
}

gplfd_status gplfd_sim_trace_stability(const gplfd_sim_trace* trace, gplfd_stability* out) {
  return Guard([&] {
    Need(trace, "trace");
    Need(out, "out");
    *out = ToC(trace->trace.stability);
  });
}

gplfd_status gplfd_sim_trace_save(const gplfd_sim_trace* trace, const char* path) {
  return Guard([&] {
    Need(trace, "trace");
    Need(path, "path");
    gplfd::save_trace(path, trace->trace);
  });
}

void gplfd_sim_trace_destroy(gplfd_sim_trace* trace) { delete trace; }

gplfd_status gplfd_check_stability(const gplfd_config* config, double sigma_rate_max,
                                   gplfd_stability* out) {
  return Guard([&] {
    Need(config, "config");
    Need(out, "out");
    if (!(sigma_rate_max >= 0.0)) {
      throw gplfd::Error(gplfd::ErrorCode::kInvalidInput, "sigma_rate_max must be >= 0");
    }
    *out = ToC(gplfd::check_stability(config->config.controller, sigma_rate_max));
  });
}

gplfd_status gplfd_write_table(const char* path, const char* const* meta, size_t meta_count,
                               const char* const* header, size_t column_count, const double* rows,
                               size_t row_count) {
  return Guard([&] {
    Need(path, "path");
    const std::vector<std::string> kv = Strings(meta, 2 * meta_count, "meta");
    gplfd::TableMetadata m;
    for (std::size_t i = 0; i < meta_count; ++i) m.emplace_back(kv[2 * i], kv[2 * i + 1]);
    if (row_count > 0 && column_count > 0) Need(rows, "rows");
    Eigen::MatrixXd data(static_cast<Eigen::Index>(row_count), static_cast<Eigen::Index>(column_count));
    for (std::size_t r = 0; r < row_count; ++r)
      for (std::size_t c = 0; c < column_count; ++c)
        data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r * column_count + c];
    gplfd::save_table(path, m, Strings(header, column_count, "header"), data);
  });
}

gplfd_status gplfd_write_manifest(const char* path, const char* command, const char* const* arguments,
                                  size_t argument_count, const gplfd_config* config,
                                  const char* const* inputs, size_t input_count,
                                  const char* const* outputs, size_t output_count) {
  return Guard([&] {
    Need(path, "path");
    Need(command, "command");
    Need(config, "config");
    gplfd::write_manifest(path, command, Strings(arguments, argument_count, "arguments"), config->config,
                          Strings(inputs, input_count, "inputs"), Strings(outputs, output_count, "outputs"));
  });
}

}  // extern "C"
