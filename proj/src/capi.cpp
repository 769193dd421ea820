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


#include "face/face.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <string>
#include <utility>

#include "face/error.hpp"
#include "face/npy.hpp"
#include "face/pipeline.hpp"
#include "face/report.hpp"
#include "face/synthetic.hpp"

struct face_bundle {
  face::DatasetBundle value;
};

struct face_factors {
  face::SolveResult solve;
  face::PipelineConfig config;
};

struct face_importance {
  face::ImportanceVector value;
};

struct face_evaluation {
  face::EvaluationReport value;
};

struct face_pipeline {
  face::PipelineConfig config;
  face::PipelineResult result;
};

struct face_sweep {
  face::SweepSpec spec;
  face::SweepTable table;
};

namespace {

thread_local std::string g_last_error;

face_status fail(face_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
face_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return FACE_OK;
  } catch (const face::Error& e) {
    return fail(static_cast<face_status>(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(FACE_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FACE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FACE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FACE_ERR_INTERNAL, "unknown error");
  }
}

#define FACE_REQUIRE(cond)                                                       \
  do {                                                                           \
    if (!(cond)) return fail(FACE_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

face::PipelineConfig to_cpp(const face_pipeline_config& c) {
  face::PipelineConfig cfg;
  cfg.rank = c.rank;
  cfg.method = c.method == FACE_METHOD_MULTIPLICATIVE ? face::FactorizationMethod::kMultiplicative
                                                      : face::FactorizationMethod::kFace;
  cfg.init.method = c.init.method == FACE_INIT_RANDOM ? face::InitMethod::kRandom : face::InitMethod::kNndsvd;
  cfg.init.seed = c.init.seed;
  cfg.init.svd_tolerance = c.init.svd_tolerance;
  cfg.init.svd_max_iterations = c.init.svd_max_iterations;

  face::SolverConfig& s = cfg.solver;
  s.lambda = c.solver.lambda;
  s.optimizer = c.solver.optimizer == FACE_OPTIMIZER_PGD ? face::Optimizer::kPgd : face::Optimizer::kAdam;
  s.learning_rate = c.solver.learning_rate;
  if (c.solver.auto_step_fraction != 0.0) s.auto_step_fraction = c.solver.auto_step_fraction;
  s.max_iterations = c.solver.max_iterations;
  s.stop_epsilon = c.solver.stop_epsilon;
  switch (c.solver.loss_variant) {
    case FACE_LOSS_REVERSE_KL: s.loss_variant = face::LossVariant::kReverseKl; break;
    case FACE_LOSS_LOGIT_MSE: s.loss_variant = face::LossVariant::kLogitMse; break;
    default: s.loss_variant = face::LossVariant::kForwardKl; break;
  }
  s.record_trace = c.solver.record_trace != 0;
  s.adam_beta1 = c.solver.adam_beta1;
  s.adam_beta2 = c.solver.adam_beta2;
  s.adam_epsilon = c.solver.adam_epsilon;

  cfg.sobol.num_designs = c.sobol.num_designs;
  cfg.sobol.sequence = c.sobol.sequence == FACE_SEQUENCE_LATIN_HYPERCUBE
                           ? face::DesignSequence::kLatinHypercube
                           : face::DesignSequence::kSobol;
  cfg.sobol.seed = c.sobol.seed;
  cfg.sobol.output =
      c.sobol.output == FACE_SOBOL_CLASS_PROB ? face::SobolOutput::kClassProb : face::SobolOutput::kClassLogit;
  if (c.sobol.target_class >= 0) cfg.sobol.target_class = c.sobol.target_class;
  return cfg;
}

face_solve_summary summarize(const face::SolveResult& r) {
  return face_solve_summary{r.factors.rank(), r.final_mse,  r.final_kl,
                            r.final_total_loss, r.iterations, r.converged ? 1 : 0};
}

face_metrics metrics_of(const face::EvaluationReport& r) {
  return face_metrics{r.mse,           r.d_kl,           r.l1_dist,           r.pinsker_bound,
                      r.pinsker_margin, r.recon_accuracy, r.baseline_accuracy, r.c_del,
                      r.c_ins,          r.c_gini};
}

face_status copy_out(const double* src, std::size_t size, double* out, std::size_t count) {
  if (count < size) {
    return fail(FACE_ERR_INVALID_ARGUMENT,
                "output buffer holds " + std::to_string(count) + " values, need " + std::to_string(size));
  }
  std::memcpy(out, src, size * sizeof(double));
  return FACE_OK;
}

template <typename Enum, typename Parse, typename Map>
face_status parse_name(const char* name, Enum* out, Parse parse, Map map) {
  FACE_REQUIRE(name && out);
  return guarded([&] { *out = map(parse(name)); });
}

}  // namespace

extern "C" {

const char* face_version(void) { return FACE_VERSION_STRING; }

const char* face_status_name(face_status status) {
  switch (status) {
    case FACE_OK: return "ok";
    case FACE_ERR_FORMAT: return "format error";
    case FACE_ERR_DIVERGED: return "solver diverged";
    case FACE_ERR_CONFIG: return "configuration error";
    case FACE_ERR_SHAPE: return "shape mismatch";
    case FACE_ERR_DOMAIN: return "domain error";
    case FACE_ERR_CONVERGENCE: return "convergence failure";
    case FACE_ERR_IO: return "i/o error";
    case FACE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FACE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* face_last_error(void) { return g_last_error.c_str(); }

void face_synth_config_default(face_synth_config* cfg) {
  if (!cfg) return;
  const face::SyntheticSpec s;
  *cfg = face_synth_config{s.n,
                           s.p,
                           s.r_true,
                           s.num_classes,
                           s.noise_sigma,
                           s.adversarial_variance ? 1 : 0,
                           s.seed,
                           s.nuisance_rank,
                           s.nuisance_scale,
                           s.predictive_scale,
                           s.head_gain,
                           s.dictionary_floor};
}

void face_pipeline_config_default(face_pipeline_config* cfg) {
  if (!cfg) return;
  const face::PipelineConfig d;
  cfg->rank = d.rank;
  cfg->method = FACE_METHOD_FACE;
  cfg->init = face_init_config{FACE_INIT_NNDSVD, d.init.seed, d.init.svd_tolerance, d.init.svd_max_iterations};
  cfg->solver = face_solver_config{d.solver.lambda,
                                   d.solver.optimizer == face::Optimizer::kPgd ? FACE_OPTIMIZER_PGD
                                                                               : FACE_OPTIMIZER_ADAM,
                                   d.solver.learning_rate,
                                   0.0,
                                   d.solver.max_iterations,
                                   d.solver.stop_epsilon,
                                   FACE_LOSS_FORWARD_KL,
                                   d.solver.record_trace ? 1 : 0,
                                   d.solver.adam_beta1,
                                   d.solver.adam_beta2,
                                   d.solver.adam_epsilon};
  cfg->sobol = face_sobol_config{d.sobol.num_designs, FACE_SEQUENCE_SOBOL, d.sobol.seed,
                                 FACE_SOBOL_CLASS_LOGIT, -1};
}

void face_sweep_config_default(face_sweep_config* cfg) {
  if (!cfg) return;
  cfg->parameter = FACE_SWEEP_LAMBDA;
  cfg->values = nullptr;
  cfg->value_count = 0;
  cfg->repeats = 1;
  cfg->jobs = 1;
  face_pipeline_config_default(&cfg->base);
}

face_status face_parse_optimizer(const char* name, face_optimizer* out) {
  return parse_name(name, out, face::parse_optimizer, [](face::Optimizer v) {
    return v == face::Optimizer::kPgd ? FACE_OPTIMIZER_PGD : FACE_OPTIMIZER_ADAM;
  });
}

face_status face_parse_loss_variant(const char* name, face_loss_variant* out) {
  return parse_name(name, out, face::parse_loss_variant, [](face::LossVariant v) {
    switch (v) {
      case face::LossVariant::kReverseKl: return FACE_LOSS_REVERSE_KL;
      case face::LossVariant::kLogitMse: return FACE_LOSS_LOGIT_MSE;
      default: return FACE_LOSS_FORWARD_KL;
    }
  });
}

face_status face_parse_init_method(const char* name, face_init_method* out) {
  return parse_name(name, out, face::parse_init_method, [](face::InitMethod v) {
    return v == face::InitMethod::kRandom ? FACE_INIT_RANDOM : FACE_INIT_NNDSVD;
  });
}

face_status face_parse_method(const char* name, face_method* out) {
  return parse_name(name, out, face::parse_factorization_method, [](face::FactorizationMethod v) {
    return v == face::FactorizationMethod::kMultiplicative ? FACE_METHOD_MULTIPLICATIVE : FACE_METHOD_FACE;
  });
}

face_status face_parse_sequence(const char* name, face_sequence* out) {
  return parse_name(name, out, face::parse_design_sequence, [](face::DesignSequence v) {
    return v == face::DesignSequence::kLatinHypercube ? FACE_SEQUENCE_LATIN_HYPERCUBE : FACE_SEQUENCE_SOBOL;
  });
}

face_status face_parse_sobol_output(const char* name, face_sobol_output* out) {
  return parse_name(name, out, face::parse_sobol_output, [](face::SobolOutput v) {
    return v == face::SobolOutput::kClassProb ? FACE_SOBOL_CLASS_PROB : FACE_SOBOL_CLASS_LOGIT;
  });
}

face_status face_parse_sweep_parameter(const char* name, face_sweep_parameter* out) {
  return parse_name(name, out, face::parse_sweep_parameter, [](face::SweepParameter v) {
    return v == face::SweepParameter::kRank ? FACE_SWEEP_RANK : FACE_SWEEP_LAMBDA;
  });
}

face_status face_bundle_synthesize(const face_synth_config* cfg, face_bundle** out) {
  FACE_REQUIRE(cfg && out);
  *out = nullptr;
  return guarded([&] {
    face::SyntheticSpec s;
    s.n = cfg->n;
    s.p = cfg->p;
    s.r_true = cfg->r_true;
    s.num_classes = cfg->num_classes;
    s.noise_sigma = cfg->noise_sigma;
    s.adversarial_variance = cfg->adversarial_variance != 0;
    s.seed = cfg->seed;
    s.nuisance_rank = cfg->nuisance_rank;
    s.nuisance_scale = cfg->nuisance_scale;
    s.predictive_scale = cfg->predictive_scale;
    s.head_gain = cfg->head_gain;
    s.dictionary_floor = cfg->dictionary_floor;
    *out = new face_bundle{face::generate_synthetic(s)};
  });
}

face_status face_bundle_create(const double* a, int64_t n, int64_t p, const int32_t* labels,
                               const double* head_w, const double* head_b, int64_t c,
                               face_bundle** out) {
  FACE_REQUIRE(a && labels && head_w && head_b && out);
  *out = nullptr;
  if (n <= 0 || p <= 0 || c <= 0) return fail(FACE_ERR_SHAPE, "dimensions must be positive");
  return guarded([&] {
    face::Matrix am = Eigen::Map<const face::Matrix>(a, n, p);
    face::Matrix wm = Eigen::Map<const face::Matrix>(head_w, c, p);
    face::Vector bv = Eigen::Map<const face::Vector>(head_b, c);
    face::DatasetBundle bundle{face::ActivationMatrix(std::move(am)),
                               face::LabelVector(labels, labels + n),
                               face::LinearHead(std::move(wm), std::move(bv)),
                               {},
                               {}};
    bundle.validate();
    *out = new face_bundle{std::move(bundle)};
  });
}

face_status face_bundle_load(const char* dir, face_bundle** out) {
  FACE_REQUIRE(dir && out);
  *out = nullptr;
  return guarded([&] { *out = new face_bundle{face::load_bundle(dir)}; });
}

face_status face_bundle_save(const face_bundle* bundle, const char* dir, int float32) {
  FACE_REQUIRE(bundle && dir);
  return guarded([&] {
    face::save_bundle(bundle->value, dir, float32 ? face::NpyDtype::kFloat32 : face::NpyDtype::kFloat64);
  });
}

void face_bundle_shape(const face_bundle* bundle, int64_t* n, int64_t* p, int64_t* c) {
  if (!bundle) return;
  if (n) *n = bundle->value.activations.rows();
  if (p) *p = bundle->value.activations.cols();
  if (c) *c = bundle->value.head.num_classes();
}

face_status face_bundle_copy_activations(const face_bundle* bundle, double* out, size_t count) {
  FACE_REQUIRE(bundle && out);
  const face::Matrix& a = bundle->value.activations.data();
  return copy_out(a.data(), static_cast<std::size_t>(a.size()), out, count);
}

void face_bundle_free(face_bundle* bundle) { delete bundle; }

face_status face_factorize(const face_bundle* bundle, const face_pipeline_config* cfg, face_factors** out) {
  FACE_REQUIRE(bundle && cfg && out);
  *out = nullptr;
  return guarded([&] {
    face::PipelineConfig config = to_cpp(*cfg);
    face::SolveResult solve = face::factorize(bundle->value, config);
    *out = new face_factors{std::move(solve), std::move(config)};
  });
}

face_status face_factors_save(const face_factors* factors, const char* dir) {
  FACE_REQUIRE(factors && dir);
  return guarded([&] { face::write_factor_outputs(dir, factors->config, factors->solve); });
}

face_status face_factors_load(const char* dir, face_factors** out) {
  FACE_REQUIRE(dir && out);
  *out = nullptr;
  return guarded([&] {
    face::SolveResult solve = face::read_factor_outputs(dir);
    face::PipelineConfig config;
    config.rank = solve.factors.rank();
    *out = new face_factors{std::move(solve), std::move(config)};
  });
}

face_status face_factors_summary(const face_factors* factors, face_solve_summary* out) {
  FACE_REQUIRE(factors && out);
  *out = summarize(factors->solve);
  return FACE_OK;
}

void face_factors_shape(const face_factors* factors, int64_t* n, int64_t* p, int64_t* rank) {
  if (!factors) return;
  if (n) *n = factors->solve.factors.u.rows();
  if (p) *p = factors->solve.factors.w.rows();
  if (rank) *rank = factors->solve.factors.rank();
}

face_status face_factors_copy_u(const face_factors* factors, double* out, size_t count) {
  FACE_REQUIRE(factors && out);
  const face::Matrix& u = factors->solve.factors.u;
  return copy_out(u.data(), static_cast<std::size_t>(u.size()), out, count);
}

face_status face_factors_copy_w(const face_factors* factors, double* out, size_t count) {
  FACE_REQUIRE(factors && out);
  const face::Matrix& w = factors->solve.factors.w;
  return copy_out(w.data(), static_cast<std::size_t>(w.size()), out, count);
}

void face_factors_free(face_factors* factors) { delete factors; }

face_status face_importance_compute(const face_bundle* bundle, const face_factors* factors,
                                    const face_sobol_config* cfg, face_importance** out) {
  FACE_REQUIRE(bundle && factors && cfg && out);
  *out = nullptr;
  return guarded([&] {
    face_pipeline_config c;
    face_pipeline_config_default(&c);
    c.sobol = *cfg;
    const face::PipelineConfig config = to_cpp(c);
    *out = new face_importance{face::concept_importance(bundle->value, factors->solve.factors, config.sobol)};
  });
}

face_status face_importance_save(const face_importance* importance, const char* path) {
  FACE_REQUIRE(importance && path);
  return guarded([&] { face::write_importance(path, importance->value); });
}

face_status face_importance_load(const char* path, face_importance** out) {
  FACE_REQUIRE(path && out);
  *out = nullptr;
  return guarded([&] { *out = new face_importance{face::read_importance(path)}; });
}

int64_t face_importance_size(const face_importance* importance) {
  return importance ? importance->value.total_indices.size() : 0;
}

face_status face_importance_copy_total(const face_importance* importance, double* out, size_t count) {
  FACE_REQUIRE(importance && out);
  const face::Vector& v = importance->value.total_indices;
  return copy_out(v.data(), static_cast<std::size_t>(v.size()), out, count);
}

face_status face_importance_copy_normalized(const face_importance* importance, double* out,
                                            size_t count) {
  FACE_REQUIRE(importance && out);
  const face::Vector& v = importance->value.normalized;
  return copy_out(v.data(), static_cast<std::size_t>(v.size()), out, count);
}

void face_importance_free(face_importance* importance) { delete importance; }

face_status face_evaluate(const face_bundle* bundle, const face_factors* factors,
                          const face_importance* importance, face_evaluation** out) {
  FACE_REQUIRE(bundle && factors && importance && out);
  *out = nullptr;
  return guarded([&] {
    const face::DatasetBundle& b = bundle->value;
    *out = new face_evaluation{
        face::evaluate(b.activations, factors->solve.factors, b.head, b.labels, importance->value)};
  });
}

face_status face_evaluation_metrics(const face_evaluation* evaluation, face_metrics* out) {
  FACE_REQUIRE(evaluation && out);
  *out = metrics_of(evaluation->value);
  return FACE_OK;
}

face_status face_evaluation_save(const face_evaluation* evaluation, const char* dir) {
  FACE_REQUIRE(evaluation && dir);
  return guarded([&] { face::write_evaluation_outputs(dir, evaluation->value); });
}

void face_evaluation_free(face_evaluation* evaluation) { delete evaluation; }

face_status face_pipeline_run(const face_bundle* bundle, const face_pipeline_config* cfg, face_pipeline** out) {
  FACE_REQUIRE(bundle && cfg && out);
  *out = nullptr;
  return guarded([&] {
    face::PipelineConfig config = to_cpp(*cfg);
    face::PipelineResult result = face::run_pipeline(bundle->value, config);
    *out = new face_pipeline{std::move(config), std::move(result)};
  });
}

face_status face_pipeline_metrics(const face_pipeline* result, face_metrics* out) {
  FACE_REQUIRE(result && out);
  *out = metrics_of(result->result.report);
  return FACE_OK;
}

face_status face_pipeline_summary(const face_pipeline* result, face_solve_summary* out) {
  FACE_REQUIRE(result && out);
  *out = summarize(result->result.solve);
  return FACE_OK;
}

face_status face_pipeline_save(const face_pipeline* result, const char* dir) {
  FACE_REQUIRE(result && dir);
  return guarded([&] { face::write_pipeline_outputs(dir, result->config, result->result); });
}

face_status face_pipeline_report_json(const face_pipeline* result, char** out) {
  FACE_REQUIRE(result && out);
  *out = nullptr;
  return guarded([&] {
    const std::string text = face::render_json(face::pipeline_json(result->config, result->result));
    char* s = new char[text.size() + 1];
    std::memcpy(s, text.c_str(), text.size() + 1);
    *out = s;
  });
}

void face_pipeline_free(face_pipeline* result) { delete result; }

face_status face_sweep_run(const face_bundle* bundle, const face_sweep_config* cfg, face_sweep** out) {
  FACE_REQUIRE(bundle && cfg && out);
  FACE_REQUIRE(cfg->values || cfg->value_count == 0);
  *out = nullptr;
  return guarded([&] {
    face::SweepSpec spec;
    spec.parameter = cfg->parameter == FACE_SWEEP_RANK ? face::SweepParameter::kRank
                                                       : face::SweepParameter::kLambda;
    spec.values.assign(cfg->values, cfg->values + cfg->value_count);
    spec.base = to_cpp(cfg->base);
    spec.repeats = cfg->repeats;
    spec.jobs = cfg->jobs;
    face::SweepTable table = face::run_sweep(bundle->value, spec);
    *out = new face_sweep{std::move(spec), std::move(table)};
  });
}

size_t face_sweep_row_count(const face_sweep* sweep) { return sweep ? sweep->table.rows.size() : 0; }

face_status face_sweep_get_row(const face_sweep* sweep, size_t index, face_sweep_row* out) {
  FACE_REQUIRE(sweep && out);
  if (index >= sweep->table.rows.size()) {
    return fail(FACE_ERR_INVALID_ARGUMENT, "row index " + std::to_string(index) + " out of range");
  }
  const face::SweepRow& r = sweep->table.rows[index];
  *out = face_sweep_row{r.value,         r.successes,   r.failures,   r.accuracy.mean, r.accuracy.std,
                        r.c_ins.mean,    r.c_ins.std,   r.c_del.mean, r.c_del.std,     r.c_gini.mean,
                        r.c_gini.std,    r.mse.mean,    r.mse.std,    r.d_kl.mean,     r.d_kl.std};
  return FACE_OK;
}

face_status face_sweep_save(const face_sweep* sweep, const char* dir) {
  FACE_REQUIRE(sweep && dir);
  return guarded([&] { face::write_sweep_outputs(dir, sweep->spec, sweep->table); });
}

void face_sweep_free(face_sweep* sweep) { delete sweep; }

void face_string_free(char* s) { delete[] s; }

}  // extern "C"
