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

/* C interface to the gplfd library. Objects are opaque handles owned by the
 * caller and released with the matching *_destroy function. Every function
 * returning gplfd_status stores a message retrievable with gplfd_last_error
 * (per thread) when it fails. Pose vectors are (x, y, z, rx, ry, rz) with the
 * rotation as a canonical rotation vector. */
#ifndef GPLFD_GPLFD_H_
#define GPLFD_GPLFD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GPLFD_API __declspec(dllexport)
#else
#define GPLFD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gplfd_status {
  GPLFD_OK = 0,
  GPLFD_INVALID_INPUT = 1,
  GPLFD_NUMERICAL_CONDITIONING = 2,
  GPLFD_STATE = 3,
  GPLFD_OPTIMIZATION_FAILURE = 4,
  GPLFD_DEGENERATE_TRAJECTORY = 5,
  GPLFD_INSUFFICIENT_DATA = 6,
  GPLFD_INCONSISTENT_CONSTRAINT = 7,
  GPLFD_DIVERGENCE = 8,
  GPLFD_PARSE = 9,
  GPLFD_FORMAT = 10,
  GPLFD_IO = 11,
  GPLFD_INTERNAL = 99
} gplfd_status;

typedef struct gplfd_config gplfd_config;
typedef struct gplfd_demo_set gplfd_demo_set;
typedef struct gplfd_policy gplfd_policy;
typedef struct gplfd_sim_trace gplfd_sim_trace;

typedef struct gplfd_via_point {
  double t;
  double pose[6];
  double strength[6];
} gplfd_via_point;

typedef struct gplfd_stability {
  double gamma;
  double sigma_rate_bound;
  double observed_max_sigma_rate;
  int satisfied;
} gplfd_stability;

typedef struct gplfd_eval_summary {
  double static_mse[6];
  double adaptive_mse[6];
  size_t steps;
} gplfd_eval_summary;

GPLFD_API const char* gplfd_version(void);
GPLFD_API const char* gplfd_last_error(void);
GPLFD_API const char* gplfd_status_name(gplfd_status status);
GPLFD_API void gplfd_string_free(char* s);

/* Configuration. Keys are dotted paths ("controller.alpha"); values are JSON
 * text, or a bare string. */
GPLFD_API gplfd_status gplfd_config_create(gplfd_config** out);
GPLFD_API gplfd_status gplfd_config_load(const char* path, gplfd_config** out);
GPLFD_API gplfd_status gplfd_config_set(gplfd_config* config, const char* key, const char* value);
GPLFD_API gplfd_status gplfd_config_to_json(const gplfd_config* config, char** out);
GPLFD_API gplfd_status gplfd_config_hash(const gplfd_config* config, uint64_t* out);
GPLFD_API void gplfd_config_destroy(gplfd_config* config);

/* Demonstration sets. */
GPLFD_API gplfd_status gplfd_demo_set_load(const char* const* paths, size_t count,
                                           gplfd_demo_set** out);
/* Synthetic set selected by the configuration's data section; `truth`, when
 * not NULL, receives one held-out demonstration. */
GPLFD_API gplfd_status gplfd_demo_set_generate(const gplfd_config* config, gplfd_demo_set** demos,
                                               gplfd_demo_set** truth);
GPLFD_API gplfd_status gplfd_demo_set_count(const gplfd_demo_set* set, size_t* out);
GPLFD_API gplfd_status gplfd_demo_set_length(const gplfd_demo_set* set, size_t index, size_t* out);
/* stamps: length entries; poses: 6 * length entries, row-major. */
GPLFD_API gplfd_status gplfd_demo_set_get(const gplfd_demo_set* set, size_t index, double* stamps,
                                          double* poses);
GPLFD_API gplfd_status gplfd_demo_set_save(const gplfd_demo_set* set, size_t index, const char* path);
/* Aligned copies on the reference's normalized clock; `reference` may be NULL. */
GPLFD_API gplfd_status gplfd_demo_set_align(const gplfd_demo_set* set, const gplfd_config* config,
                                            gplfd_demo_set** out, size_t* reference);
GPLFD_API void gplfd_demo_set_destroy(gplfd_demo_set* set);

/* Policies. Query outputs hold 6 * count entries, row-major. */
GPLFD_API gplfd_status gplfd_policy_learn(const gplfd_demo_set* demos, const gplfd_config* config,
                                          gplfd_policy** out);
GPLFD_API gplfd_status gplfd_policy_load(const char* path, gplfd_policy** out);
GPLFD_API gplfd_status gplfd_policy_save(const gplfd_policy* policy, const char* path);
GPLFD_API gplfd_status gplfd_policy_query(const gplfd_policy* policy, const double* t, size_t count,
                                          double* mean, double* var);
GPLFD_API gplfd_status gplfd_policy_adapt(const gplfd_policy* policy, const gplfd_via_point* via,
                                          size_t via_count, const double* t, size_t count,
                                          double* mean, double* var);
/* Streaming via-point evaluation against demonstration `index` of `truth`,
 * with via-point strengths from the configuration. When `steps_path` is not
 * NULL the per-step predictions are written there. */
GPLFD_API gplfd_status gplfd_policy_evaluate_streaming(const gplfd_policy* policy,
                                                       const gplfd_demo_set* truth, size_t index,
                                                       const gplfd_config* config,
                                                       gplfd_eval_summary* out,
                                                       const char* steps_path);
GPLFD_API void gplfd_policy_destroy(gplfd_policy* policy);

/* Admittance simulation driven by the policy. `truth` is required when the
 * configured force model is "spring". */
GPLFD_API gplfd_status gplfd_simulate_policy(const gplfd_policy* policy, const gplfd_demo_set* truth,
                                             size_t index, const gplfd_config* config,
                                             gplfd_sim_trace** out);
GPLFD_API gplfd_status gplfd_sim_trace_length(const gplfd_sim_trace* trace, size_t* out);
/* name: time, energy (axis ignored) or error, error_rate, stiffness, damping,
 * force, sigma, sigma_rate (axis 0..5). `out` holds length entries. */
GPLFD_API gplfd_status gplfd_sim_trace_column(const gplfd_sim_trace* trace, const char* name,
                                              size_t axis, double* out);
GPLFD_API gplfd_status gplfd_sim_trace_stability(const gplfd_sim_trace* trace, gplfd_stability* out);
GPLFD_API gplfd_status gplfd_sim_trace_save(const gplfd_sim_trace* trace, const char* path);
GPLFD_API void gplfd_sim_trace_destroy(gplfd_sim_trace* trace);

GPLFD_API gplfd_status gplfd_check_stability(const gplfd_config* config, double sigma_rate_max,
                                             gplfd_stability* out);

/* Columnar table: `meta` holds 2 * meta_count strings (key, value, ...);
 * `rows` is row_count * column_count, row-major. */
GPLFD_API gplfd_status gplfd_write_table(const char* path, const char* const* meta, size_t meta_count,
                                         const char* const* header, size_t column_count,
                                         const double* rows, size_t row_count);
GPLFD_API gplfd_status gplfd_write_manifest(const char* path, const char* command,
                                            const char* const* arguments, size_t argument_count,
                                            const gplfd_config* config,
                                            const char* const* inputs, size_t input_count,
                                            const char* const* outputs, size_t output_count);

#ifdef __cplusplus
}
#endif

#endif /* GPLFD_GPLFD_H_ */
