/*
 * Copyright 2026 The FACE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libface.
 *
 * Every fallible call returns a face_status. On failure the message is
 * available from face_last_error() on the calling thread until the next call
 * into the library. Objects are opaque and released with their *_free
 * function; passing NULL to a *_free function is a no-op. Config structs must
 * be initialized with the matching *_default function before use.
 */

#ifndef FACE_FACE_H_
#define FACE_FACE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FACE_BUILDING_LIBRARY)
#define FACE_API __declspec(dllexport)
#else
#define FACE_API __declspec(dllimport)
#endif
#else
#define FACE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum face_status {
  FACE_OK = 0,
  FACE_ERR_FORMAT = 2,
  FACE_ERR_DIVERGED = 3,
  FACE_ERR_CONFIG = 4,
  FACE_ERR_SHAPE = 5,
  FACE_ERR_DOMAIN = 6,
  FACE_ERR_CONVERGENCE = 7,
  FACE_ERR_IO = 8,
  FACE_ERR_INVALID_ARGUMENT = 9,
  FACE_ERR_INTERNAL = 10
} face_status;

FACE_API const char* face_version(void);
FACE_API const char* face_status_name(face_status status);
FACE_API const char* face_last_error(void);

typedef enum face_optimizer { FACE_OPTIMIZER_PGD = 0, FACE_OPTIMIZER_ADAM = 1 } face_optimizer;

typedef enum face_loss_variant {
  FACE_LOSS_FORWARD_KL = 0,
  FACE_LOSS_REVERSE_KL = 1,
  FACE_LOSS_LOGIT_MSE = 2
} face_loss_variant;

typedef enum face_init_method { FACE_INIT_NNDSVD = 0, FACE_INIT_RANDOM = 1 } face_init_method;

typedef enum face_method { FACE_METHOD_FACE = 0, FACE_METHOD_MULTIPLICATIVE = 1 } face_method;

typedef enum face_sequence { FACE_SEQUENCE_SOBOL = 0, FACE_SEQUENCE_LATIN_HYPERCUBE = 1 } face_sequence;

typedef enum face_sobol_output {
  FACE_SOBOL_CLASS_LOGIT = 0,
  FACE_SOBOL_CLASS_PROB = 1
} face_sobol_output;

typedef enum face_sweep_parameter { FACE_SWEEP_LAMBDA = 0, FACE_SWEEP_RANK = 1 } face_sweep_parameter;

typedef struct face_synth_config {
  int64_t n;
  int64_t p;
  int64_t r_true;
  int64_t num_classes;
  double noise_sigma;
  int adversarial_variance;
  uint64_t seed;
  int64_t nuisance_rank; /* 0: num_classes */
  double nuisance_scale;
  double predictive_scale;
  double head_gain;
  double dictionary_floor;
} face_synth_config;

typedef struct face_init_config {
  face_init_method method;
  uint64_t seed;
  double svd_tolerance;
  int svd_max_iterations;
} face_init_config;

typedef struct face_solver_config {
  double lambda;
  face_optimizer optimizer;
  double learning_rate;
  /* PGD only: step = fraction * estimated bound, re-estimated each iteration.
     0 keeps the fixed learning rate. */
  double auto_step_fraction;
  int max_iterations;
  double stop_epsilon;
  face_loss_variant loss_variant;
  int record_trace;
  double adam_beta1;
  double adam_beta2;
  double adam_epsilon;
} face_solver_config;

typedef struct face_sobol_config {
  int64_t num_designs;
  face_sequence sequence;
  uint64_t seed;
  face_sobol_output output;
  int target_class; /* negative: each sample's label */
} face_sobol_config;

typedef struct face_pipeline_config {
  int64_t rank;
  face_method method;
  face_init_config init;
  face_solver_config solver;
  face_sobol_config sobol;
} face_pipeline_config;

typedef struct face_sweep_config {
  face_sweep_parameter parameter;
  const double* values;
  size_t value_count;
  int repeats;
  int jobs;
  face_pipeline_config base;
} face_sweep_config;

typedef struct face_solve_summary {
  int64_t rank;
  double final_mse;
  double final_kl;
  double final_total_loss;
  int iterations;
  int converged;
} face_solve_summary;

typedef struct face_metrics {
  double mse;
  double d_kl;
  double l1_dist;
  double pinsker_bound;
  double pinsker_margin;
  double recon_accuracy;
  double baseline_accuracy;
  double c_del;
  double c_ins;
  double c_gini;
} face_metrics;

typedef struct face_sweep_row {
  double value;
  int successes;
  int failures;
  double accuracy_mean, accuracy_std;
  double c_ins_mean, c_ins_std;
  double c_del_mean, c_del_std;
  double c_gini_mean, c_gini_std;
  double mse_mean, mse_std;
  double d_kl_mean, d_kl_std;
} face_sweep_row;

FACE_API void face_synth_config_default(face_synth_config* cfg);
FACE_API void face_pipeline_config_default(face_pipeline_config* cfg);
FACE_API void face_sweep_config_default(face_sweep_config* cfg);

/* Parses a command-line style name ("adam", "reverse_kl", "sobol_lds", ...).
   Returns FACE_ERR_CONFIG for unknown names. */
FACE_API face_status face_parse_optimizer(const char* name, face_optimizer* out);
FACE_API face_status face_parse_loss_variant(const char* name, face_loss_variant* out);
FACE_API face_status face_parse_init_method(const char* name, face_init_method* out);
FACE_API face_status face_parse_method(const char* name, face_method* out);
FACE_API face_status face_parse_sequence(const char* name, face_sequence* out);
FACE_API face_status face_parse_sobol_output(const char* name, face_sobol_output* out);
FACE_API face_status face_parse_sweep_parameter(const char* name, face_sweep_parameter* out);

/* Dataset bundles: activations, labels and the linear head. */
typedef struct face_bundle face_bundle;

FACE_API face_status face_bundle_synthesize(const face_synth_config* cfg, face_bundle** out);
/* a: n*p row-major, head_w: c*p row-major. */
FACE_API face_status face_bundle_create(const double* a, int64_t n, int64_t p, const int32_t* labels,
                                        const double* head_w, const double* head_b, int64_t c,
                                        face_bundle** out);
FACE_API face_status face_bundle_load(const char* dir, face_bundle** out);
/* float32 != 0 stores activations as float32. */
FACE_API face_status face_bundle_save(const face_bundle* bundle, const char* dir, int float32);
FACE_API void face_bundle_shape(const face_bundle* bundle, int64_t* n, int64_t* p, int64_t* c);
FACE_API face_status face_bundle_copy_activations(const face_bundle* bundle, double* out, size_t count);
FACE_API void face_bundle_free(face_bundle* bundle);

/* Factorization results. */
typedef struct face_factors face_factors;

FACE_API face_status face_factorize(const face_bundle* bundle, const face_pipeline_config* cfg,
                                    face_factors** out);
/* Writes U.npy, W.npy, solve.json and, with a recorded trace, trace.csv. */
FACE_API face_status face_factors_save(const face_factors* factors, const char* dir);
FACE_API face_status face_factors_load(const char* dir, face_factors** out);
FACE_API face_status face_factors_summary(const face_factors* factors, face_solve_summary* out);
FACE_API void face_factors_shape(const face_factors* factors, int64_t* n, int64_t* p, int64_t* rank);
FACE_API face_status face_factors_copy_u(const face_factors* factors, double* out, size_t count);
FACE_API face_status face_factors_copy_w(const face_factors* factors, double* out, size_t count);
FACE_API void face_factors_free(face_factors* factors);

/* Total Sobol indices of the concepts. */
typedef struct face_importance face_importance;

FACE_API face_status face_importance_compute(const face_bundle* bundle, const face_factors* factors,
                                             const face_sobol_config* cfg, face_importance** out);
FACE_API face_status face_importance_save(const face_importance* importance, const char* path);
FACE_API face_status face_importance_load(const char* path, face_importance** out);
FACE_API int64_t face_importance_size(const face_importance* importance);
FACE_API face_status face_importance_copy_total(const face_importance* importance, double* out,
                                                size_t count);
FACE_API face_status face_importance_copy_normalized(const face_importance* importance, double* out,
                                                     size_t count);
FACE_API void face_importance_free(face_importance* importance);

/* Metric suite. */
typedef struct face_evaluation face_evaluation;

FACE_API face_status face_evaluate(const face_bundle* bundle, const face_factors* factors,
                                   const face_importance* importance, face_evaluation** out);
FACE_API face_status face_evaluation_metrics(const face_evaluation* evaluation, face_metrics* out);
/* Writes report.json and curves.csv. */
FACE_API face_status face_evaluation_save(const face_evaluation* evaluation, const char* dir);
FACE_API void face_evaluation_free(face_evaluation* evaluation);

/* Factorization, importance and metrics in one call. */
typedef struct face_pipeline face_pipeline;

FACE_API face_status face_pipeline_run(const face_bundle* bundle, const face_pipeline_config* cfg,
                                       face_pipeline** out);
FACE_API face_status face_pipeline_metrics(const face_pipeline* result, face_metrics* out);
FACE_API face_status face_pipeline_summary(const face_pipeline* result, face_solve_summary* out);
/* Writes report.json and curves.csv. */
FACE_API face_status face_pipeline_save(const face_pipeline* result, const char* dir);
/* The report as JSON text; release with face_string_free. */
FACE_API face_status face_pipeline_report_json(const face_pipeline* result, char** out);
FACE_API void face_pipeline_free(face_pipeline* result);

/* Parameter sweeps. Cell failures are recorded in the table, not returned. */
typedef struct face_sweep face_sweep;

FACE_API face_status face_sweep_run(const face_bundle* bundle, const face_sweep_config* cfg,
                                    face_sweep** out);
FACE_API size_t face_sweep_row_count(const face_sweep* sweep);
FACE_API face_status face_sweep_get_row(const face_sweep* sweep, size_t index, face_sweep_row* out);
/* Writes sweep.json and sweep.csv. */
FACE_API face_status face_sweep_save(const face_sweep* sweep, const char* dir);
FACE_API void face_sweep_free(face_sweep* sweep);

FACE_API void face_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FACE_FACE_H_ */
