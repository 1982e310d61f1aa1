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

// Command-line front end over the C interface.
//
//   gplfd gen-data --out DIR
//   gplfd align    --out DIR   DEMO...
//   gplfd fit      --out FILE  DEMO...
//   gplfd query    --policy FILE --out FILE
//   gplfd adapt    --policy FILE --via FILE --out FILE
//   gplfd simulate --policy FILE [--truth FILE] --out FILE
//   gplfd eval     --policy FILE --truth FILE --out FILE [--steps FILE]
//
// Every command takes --config FILE (a configuration or a run manifest) and
// repeated --set key=value, and writes a run manifest next to its output.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gplfd/gplfd.h"

namespace fs = std::filesystem;

namespace {

struct Failure {
  int status;
  std::string message;
};

void Check(gplfd_status s, const std::string& what) {
  if (s != GPLFD_OK) {
    throw Failure{static_cast<int>(s),
                  what + ": " + gplfd_status_name(s) + ": " + gplfd_last_error()};
  }
}

template <typename T, void (*Destroy)(T*)>
class Handle {
 public:
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() {
    if (p_ != nullptr) Destroy(p_);
  }
  T** out() { return &p_; }
  T* get() const { return p_; }

 private:
  T* p_ = nullptr;
};

using Config = Handle<gplfd_config, gplfd_config_destroy>;
using DemoSet = Handle<gplfd_demo_set, gplfd_demo_set_destroy>;
using Policy = Handle<gplfd_policy, gplfd_policy_destroy>;
using Trace = Handle<gplfd_sim_trace, gplfd_sim_trace_destroy>;

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string manifest;
};

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "configuration or run manifest (JSON)");
  app->add_option("--set", c.sets, "override, key=value with a JSON value")->take_all();
  app->add_option("--manifest", c.manifest, "run manifest path (default: next to the output)");
}

void LoadConfig(const Common& c, Config& cfg) {
  if (c.config.empty()) {
    Check(gplfd_config_create(cfg.out()), "config");
  } else {
    Check(gplfd_config_load(c.config.c_str(), cfg.out()), "config " + c.config);
  }
  for (const std::string& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{GPLFD_INVALID_INPUT, "--set expects key=value, got '" + kv + "'"};
    Check(gplfd_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set " + kv);
  }
}

std::vector<const char*> CStrings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

void Manifest(const std::string& path, const std::string& command, const std::vector<std::string>& args,
              const Config& cfg, const std::vector<std::string>& inputs,
              const std::vector<std::string>& outputs) {
  const auto a = CStrings(args), i = CStrings(inputs), o = CStrings(outputs);
  Check(gplfd_write_manifest(path.c_str(), command.c_str(), a.data(), a.size(), cfg.get(), i.data(),
                             i.size(), o.data(), o.size()),
        "manifest");
}

std::string ManifestFor(const Common& c, const std::string& out, bool directory) {
  if (!c.manifest.empty()) return c.manifest;
  return directory ? (fs::path(out) / "manifest.json").string() : out + ".manifest.json";
}

void MakeDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{GPLFD_IO, "cannot create directory '" + dir + "': " + ec.message()};
}

std::string Indexed(const std::string& dir, const char* stem, std::size_t i) {
  char name[64];
  std::snprintf(name, sizeof name, "%s_%02zu.csv", stem, i);
  return (fs::path(dir) / name).string();
}

void LoadDemos(const std::vector<std::string>& paths, DemoSet& set) {
  const auto p = CStrings(paths);
  Check(gplfd_demo_set_load(p.data(), p.size(), set.out()), "load demonstrations");
}

const char* kAxes[6] = {"x", "y", "z", "rx", "ry", "rz"};

void WriteDistributionTable(const std::string& path, const char* kind, const std::vector<double>& t,
                            const std::vector<double>& mean, const std::vector<double>& var) {
  std::vector<std::string> header{"t"};
  for (const char* a : kAxes) header.push_back(std::string("mean_") + a);
  for (const char* a : kAxes) header.push_back(std::string("var_") + a);
  std::vector<double> rows;
  for (std::size_t i = 0; i < t.size(); ++i) {
    rows.push_back(t[i]);
    for (int d = 0; d < 6; ++d) rows.push_back(mean[6 * i + d]);
    for (int d = 0; d < 6; ++d) rows.push_back(var[6 * i + d]);
  }
  const auto h = CStrings(header);
  const char* meta[] = {"format", kind};
  Check(gplfd_write_table(path.c_str(), meta, 1, h.data(), h.size(), rows.data(), t.size()), "write " + path);
}

std::vector<double> Grid(const Config& cfg) {
  char* json = nullptr;
  Check(gplfd_config_to_json(cfg.get(), &json), "config");
  const std::string text(json);
  gplfd_string_free(json);
  const auto key = text.find("\"query_points\":");
  const int n = key == std::string::npos ? 101 : std::atoi(text.c_str() + key + 15);
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
  return t;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string f;
  std::istringstream in(line);
  while (std::getline(in, f, ',')) out.push_back(f);
  return out;
}

// Via-point file: '#' comments, a header row, then t,x,y,z,rx,ry,rz and an
// optional six strength columns.
std::vector<gplfd_via_point> ReadVia(const std::string& path, const Config& cfg) {
  std::ifstream in(path);
  if (!in) throw Failure{GPLFD_IO, "cannot open '" + path + "' for reading"};
  char* json = nullptr;
  Check(gplfd_config_to_json(cfg.get(), &json), "config");
  const std::string text(json);
  gplfd_string_free(json);
  double strength[6];
  {
    const auto key = text.find("\"strength\":[");
    std::istringstream s(text.substr(key + 12));
    for (double& v : strength) {
      s >> v;
      s.ignore(1);
    }
  }
  std::vector<gplfd_via_point> via;
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto f = SplitCsv(line);
    if (f.size() != 7 && f.size() != 13) {
      throw Failure{GPLFD_PARSE, path + ":" + std::to_string(lineno) + ": expected 7 or 13 values"};
    }
    gplfd_via_point v{};
    std::vector<double> x;
    for (const auto& s : f) {
      char* end = nullptr;
      const double d = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0' || !std::isfinite(d)) {
        throw Failure{GPLFD_PARSE, path + ":" + std::to_string(lineno) + ": bad number '" + s + "'"};
      }
      x.push_back(d);
    }
    v.t = x[0];
    for (int d = 0; d < 6; ++d) {
      v.pose[d] = x[1 + d];
      v.strength[d] = f.size() == 13 ? x[7 + d] : strength[d];
    }
    via.push_back(v);
  }
  return via;
}

void WriteVia(const std::string& path, const DemoSet& truth) {
  std::size_t n = 0;
  Check(gplfd_demo_set_length(truth.get(), 0, &n), "truth");
  std::vector<double> t(n), p(6 * n);
  Check(gplfd_demo_set_get(truth.get(), 0, t.data(), p.data()), "truth");
  std::vector<double> rows;
  for (std::size_t i : {std::size_t{0}, n / 2, n - 1}) {
    rows.push_back((t[i] - t.front()) / (t.back() - t.front()));
    for (int d = 0; d < 6; ++d) rows.push_back(p[6 * i + d]);
  }
  const char* header[] = {"t", "x", "y", "z", "rx", "ry", "rz"};
  const char* meta[] = {"format", "gplfd-via v1", "clock", "normalized"};
  Check(gplfd_write_table(path.c_str(), meta, 2, header, 7, rows.data(), 3), "write " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gplfd: learning from demonstration with heteroscedastic Gaussian processes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gplfd_version()));
  std::vector<std::string> args(argv + 1, argv + argc);

  Common common;
  std::string out, policy_path, truth_path, via_path, steps_path;
  std::vector<std::string> inputs;

  auto* gen = app.add_subcommand("gen-data", "write the synthetic demonstration set and a held-out truth");
  gen->add_option("--out", out, "output directory")->required();
  AddCommon(gen, common);

  auto* align = app.add_subcommand("align", "time-align demonstrations onto a common clock");
  align->add_option("--out", out, "output directory")->required();
  align->add_option("demos", inputs, "demonstration files")->required();
  AddCommon(align, common);

  auto* fit = app.add_subcommand("fit", "learn a task policy");
  fit->add_option("--out", out, "policy file")->required();
  fit->add_option("demos", inputs, "demonstration files")->required();
  AddCommon(fit, common);

  auto* query = app.add_subcommand("query", "tabulate the policy mean and variance");
  query->add_option("--policy", policy_path)->required();
  query->add_option("--out", out, "table file")->required();
  AddCommon(query, common);

  auto* adapt = app.add_subcommand("adapt", "fuse via-points into the policy");
  adapt->add_option("--policy", policy_path)->required();
  adapt->add_option("--via", via_path, "via-point table")->required();
  adapt->add_option("--out", out, "table file")->required();
  AddCommon(adapt, common);

  auto* sim = app.add_subcommand("simulate", "run the uncertainty-modulated admittance controller");
  sim->add_option("--policy", policy_path)->required();
  sim->add_option("--truth", truth_path, "ground truth for the spring force model");
  sim->add_option("--out", out, "trace file")->required();
  AddCommon(sim, common);

  auto* eval = app.add_subcommand("eval", "streaming via-point evaluation against a truth trajectory");
  eval->add_option("--policy", policy_path)->required();
  eval->add_option("--truth", truth_path)->required();
  eval->add_option("--out", out, "MSE table")->required();
  eval->add_option("--steps", steps_path, "per-step prediction table");
  AddCommon(eval, common);

  CLI11_PARSE(app, argc, argv);

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    Config cfg;
    LoadConfig(common, cfg);
    std::vector<std::string> read, written;

    if (cmd == gen) {
      MakeDir(out);
      DemoSet demos, truth;
      Check(gplfd_demo_set_generate(cfg.get(), demos.out(), truth.out()), "generate");
      std::size_t n = 0;
      Check(gplfd_demo_set_count(demos.get(), &n), "generate");
      for (std::size_t i = 0; i < n; ++i) {
        written.push_back(Indexed(out, "demo", i));
        Check(gplfd_demo_set_save(demos.get(), i, written.back().c_str()), "write " + written.back());
      }
      written.push_back((fs::path(out) / "truth.csv").string());
      Check(gplfd_demo_set_save(truth.get(), 0, written.back().c_str()), "write " + written.back());
      written.push_back((fs::path(out) / "via.csv").string());
      WriteVia(written.back(), truth);
    } else if (cmd == align) {
      MakeDir(out);
      DemoSet demos, aligned;
      LoadDemos(inputs, demos);
      read = inputs;
      std::size_t ref = 0, n = 0;
      Check(gplfd_demo_set_align(demos.get(), cfg.get(), aligned.out(), &ref), "align");
      Check(gplfd_demo_set_count(aligned.get(), &n), "align");
      for (std::size_t i = 0; i < n; ++i) {
        written.push_back(Indexed(out, "aligned", i));
        Check(gplfd_demo_set_save(aligned.get(), i, written.back().c_str()), "write " + written.back());
      }
      std::printf("aligned %zu of %zu demonstrations onto %s\n", n, inputs.size(), inputs[ref].c_str());
    } else if (cmd == fit) {
      DemoSet demos;
      Policy policy;
      LoadDemos(inputs, demos);
      read = inputs;
      Check(gplfd_policy_learn(demos.get(), cfg.get(), policy.out()), "fit");
      Check(gplfd_policy_save(policy.get(), out.c_str()), "write " + out);
      written.push_back(out);
    } else if (cmd == query || cmd == adapt) {
      Policy policy;
      Check(gplfd_policy_load(policy_path.c_str(), policy.out()), "load " + policy_path);
      read.push_back(policy_path);
      const std::vector<double> t = Grid(cfg);
      std::vector<double> mean(6 * t.size()), var(6 * t.size());
      if (cmd == query) {
        Check(gplfd_policy_query(policy.get(), t.data(), t.size(), mean.data(), var.data()), "query");
      } else {
        const auto via = ReadVia(via_path, cfg);
        read.push_back(via_path);
        Check(gplfd_policy_adapt(policy.get(), via.data(), via.size(), t.data(), t.size(), mean.data(),
                                 var.data()),
              "adapt");
      }
      WriteDistributionTable(out, cmd == query ? "gplfd-query v1" : "gplfd-adapt v1", t, mean, var);
      written.push_back(out);
    } else if (cmd == sim) {
      Policy policy;
      DemoSet truth;
      Check(gplfd_policy_load(policy_path.c_str(), policy.out()), "load " + policy_path);
      read.push_back(policy_path);
      if (!truth_path.empty()) {
        LoadDemos({truth_path}, truth);
        read.push_back(truth_path);
      }
      Trace trace;
      Check(gplfd_simulate_policy(policy.get(), truth.get(), 0, cfg.get(), trace.out()), "simulate");
      Check(gplfd_sim_trace_save(trace.get(), out.c_str()), "write " + out);
      written.push_back(out);
      gplfd_stability st{};
      Check(gplfd_sim_trace_stability(trace.get(), &st), "simulate");
      std::printf("max dsigma/dt %.6g, bound %.6g: %s\n", st.observed_max_sigma_rate, st.sigma_rate_bound,
                  st.satisfied ? "within the stability bound" : "bound exceeded");
    } else if (cmd == eval) {
      Policy policy;
      DemoSet truth;
      Check(gplfd_policy_load(policy_path.c_str(), policy.out()), "load " + policy_path);
      LoadDemos({truth_path}, truth);
      read = {policy_path, truth_path};
      gplfd_eval_summary sum{};
      Check(gplfd_policy_evaluate_streaming(policy.get(), truth.get(), 0, cfg.get(), &sum,
                                            steps_path.empty() ? nullptr : steps_path.c_str()),
            "eval");
      std::vector<double> rows;
      double ms = 0.0, ma = 0.0;
      for (int d = 0; d < 6; ++d) {
        const double red = sum.static_mse[d] > 0.0 ? 1.0 - sum.adaptive_mse[d] / sum.static_mse[d] : 0.0;
        rows.insert(rows.end(), {static_cast<double>(d), sum.static_mse[d], sum.adaptive_mse[d], red});
        ms += sum.static_mse[d] / 6.0;
        ma += sum.adaptive_mse[d] / 6.0;
        std::printf("%-3s static %.6e adaptive %.6e\n", kAxes[d], sum.static_mse[d], sum.adaptive_mse[d]);
      }
      char a[32], b[32], s[32];
      std::snprintf(a, sizeof a, "%.17g", ms);
      std::snprintf(b, sizeof b, "%.17g", ma);
      std::snprintf(s, sizeof s, "%zu", sum.steps);
      const char* meta[] = {"format", "gplfd-eval v1", "steps", s, "mean_static_mse", a, "mean_adaptive_mse", b};
      const char* header[] = {"dimension", "static_mse", "adaptive_mse", "relative_reduction"};
      Check(gplfd_write_table(out.c_str(), meta, 4, header, 4, rows.data(), 6), "write " + out);
      written.push_back(out);
      if (!steps_path.empty()) written.push_back(steps_path);
    }
    if (!common.config.empty()) read.insert(read.begin(), common.config);
    const bool dir = cmd == gen || cmd == align;
    Manifest(ManifestFor(common, out, dir), name, args, cfg, read, written);
  } catch (const Failure& f) {
    std::fprintf(stderr, "gplfd %s: error: %s\n", name.c_str(), f.message.c_str());
    return f.status == 0 ? 1 : f.status;
  }
  return 0;
}
