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


// Command-line front end over the C API.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "face/face.h"

namespace {

// Exit status for anything that is not one of the library's documented
// categories but still comes from bad user input.
constexpr int kExitConfig = FACE_ERR_CONFIG;

struct CommonOptions {
  std::string bundle;
  std::string out;
  uint64_t seed = 0;
};

struct SolverOptions {
  int64_t rank = 0;
  std::string method = "face";
  std::string init = "nndsvd";
  double lambda = 0.0;
  std::string optimizer = "adam";
  double learning_rate = 0.0;
  double auto_step = 0.0;
  int max_iterations = 0;
  double stop_epsilon = 0.0;
  std::string loss = "forward_kl";
  bool trace = false;
};

struct SobolOptions {
  int64_t designs = 0;
  std::string sequence = "sobol_lds";
  std::string output = "class_logit";
  int target_class = -1;
};

// Maps library status codes onto process exit codes. Errors that are neither
// format, divergence nor configuration problems fall back to the closest of
// the three.
int exit_code(face_status status) {
  switch (status) {
    case FACE_OK: return 0;
    case FACE_ERR_FORMAT:
    case FACE_ERR_IO: return FACE_ERR_FORMAT;
    case FACE_ERR_DIVERGED:
    case FACE_ERR_CONVERGENCE: return FACE_ERR_DIVERGED;
    case FACE_ERR_CONFIG:
    case FACE_ERR_SHAPE:
    case FACE_ERR_DOMAIN:
    case FACE_ERR_INVALID_ARGUMENT: return kExitConfig;
    case FACE_ERR_INTERNAL: return 1;
  }
  return 1;
}

class Failure {
 public:
  explicit Failure(face_status s) : status(s) {}
  face_status status;
};

void check(face_status status, const char* what) {
  if (status == FACE_OK) return;
  std::fprintf(stderr, "face: %s: %s (%s)\n", what, face_last_error(), face_status_name(status));
  throw Failure(status);
}

template <typename T, void (*Free)(T*)>
class Handle {
 public:
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr_); }
  T** out() { return &ptr_; }
  T* get() const { return ptr_; }

 private:
  T* ptr_ = nullptr;
};

using Bundle = Handle<face_bundle, face_bundle_free>;
using Factors = Handle<face_factors, face_factors_free>;
using Importance = Handle<face_importance, face_importance_free>;
using Evaluation = Handle<face_evaluation, face_evaluation_free>;
using Pipeline = Handle<face_pipeline, face_pipeline_free>;
using Sweep = Handle<face_sweep, face_sweep_free>;

void add_solver_options(CLI::App* cmd, SolverOptions& o) {
  cmd->add_option("--rank", o.rank, "Number of concepts (default 25)");
  cmd->add_option("--method", o.method, "face or multiplicative")->capture_default_str();
  cmd->add_option("--init", o.init, "nndsvd or random")->capture_default_str();
  cmd->add_option("--lambda", o.lambda, "KL weight")->capture_default_str();
  cmd->add_option("--optimizer", o.optimizer, "adam or pgd")->capture_default_str();
  cmd->add_option("--lr", o.learning_rate, "Learning rate (default 5e-4)");
  cmd->add_option("--auto-step", o.auto_step,
                  "PGD: step as a fraction of the estimated stability bound");
  cmd->add_option("--max-iter", o.max_iterations, "Iteration budget (default 20000)");
  cmd->add_option("--stop-eps", o.stop_epsilon, "Absolute loss change for early stopping (default 1e-3)");
  cmd->add_option("--loss", o.loss, "forward_kl, reverse_kl or logit_mse")->capture_default_str();
  cmd->add_flag("--trace", o.trace, "Record the per-iteration loss");
}

void add_sobol_options(CLI::App* cmd, SobolOptions& o) {
  cmd->add_option("--designs", o.designs, "Quasi-Monte Carlo designs per sample (default 32)");
  cmd->add_option("--sequence", o.sequence, "sobol_lds or latin_hypercube")->capture_default_str();
  cmd->add_option("--output", o.output, "class_logit or class_prob")->capture_default_str();
  cmd->add_option("--target-class", o.target_class, "Explained class (default: each sample's label)");
}

void apply(const SolverOptions& o, uint64_t seed, face_pipeline_config& cfg) {
  if (o.rank != 0) cfg.rank = o.rank;
  check(face_parse_method(o.method.c_str(), &cfg.method), "--method");
  check(face_parse_init_method(o.init.c_str(), &cfg.init.method), "--init");
  check(face_parse_optimizer(o.optimizer.c_str(), &cfg.solver.optimizer), "--optimizer");
  check(face_parse_loss_variant(o.loss.c_str(), &cfg.solver.loss_variant), "--loss");
  cfg.init.seed = seed;
  cfg.solver.lambda = o.lambda;
  if (o.learning_rate != 0.0) cfg.solver.learning_rate = o.learning_rate;
  cfg.solver.auto_step_fraction = o.auto_step;
  if (o.max_iterations != 0) cfg.solver.max_iterations = o.max_iterations;
  if (o.stop_epsilon != 0.0) cfg.solver.stop_epsilon = o.stop_epsilon;
  cfg.solver.record_trace = o.trace ? 1 : 0;
}

void apply(const SobolOptions& o, uint64_t seed, face_sobol_config& cfg) {
  if (o.designs != 0) cfg.num_designs = o.designs;
  check(face_parse_sequence(o.sequence.c_str(), &cfg.sequence), "--sequence");
  check(face_parse_sobol_output(o.output.c_str(), &cfg.output), "--output");
  cfg.target_class = o.target_class;
  cfg.seed = seed;
}

void print_metrics(const face_metrics& m) {
  std::printf("mse            %.6g\n", m.mse);
  std::printf("d_kl           %.6g\n", m.d_kl);
  std::printf("l1 / pinsker   %.6g / %.6g\n", m.l1_dist, m.pinsker_bound);
  std::printf("recon accuracy %.4f (baseline %.4f)\n", m.recon_accuracy, m.baseline_accuracy);
  std::printf("c_ins          %.4f\n", m.c_ins);
  std::printf("c_del          %.4f\n", m.c_del);
  std::printf("c_gini         %.4f\n", m.c_gini);
}

void print_summary(const face_solve_summary& s) {
  std::printf("rank %lld, %d iterations (%s), mse %.6g, kl %.6g, loss %.6g\n",
              static_cast<long long>(s.rank), s.iterations, s.converged ? "converged" : "budget exhausted",
              s.final_mse, s.final_kl, s.final_total_loss);
}

std::vector<double> default_sweep_values(face_sweep_parameter parameter) {
  std::vector<double> values;
  if (parameter == FACE_SWEEP_RANK) {
    for (int r = 5; r <= 25; r += 5) values.push_back(r);
  } else {
    for (int e = -25; e <= 20; e += 5) values.push_back(std::pow(10.0, e));
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept extraction by KL-regularized non-negative matrix factorization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(face_version()));

  // synth
  face_synth_config synth;
  face_synth_config_default(&synth);
  std::string synth_out;
  bool synth_float32 = false;
  bool synth_adversarial = false;
  auto* cmd_synth = app.add_subcommand("synth", "Write a synthetic dataset bundle");
  cmd_synth->add_option("--out", synth_out, "Bundle directory")->required();
  cmd_synth->add_option("--n", synth.n, "Samples")->capture_default_str();
  cmd_synth->add_option("--p", synth.p, "Features")->capture_default_str();
  cmd_synth->add_option("--r-true", synth.r_true, "Planted concepts")->capture_default_str();
  cmd_synth->add_option("--classes", synth.num_classes, "Classes")->capture_default_str();
  cmd_synth->add_option("--noise", synth.noise_sigma, "Std of the absolute Gaussian noise")->capture_default_str();
  cmd_synth->add_flag("--adversarial", synth_adversarial, "Add high-variance nuisance components");
  cmd_synth->add_option("--nuisance-rank", synth.nuisance_rank, "Nuisance components (0: one per class)");
  cmd_synth->add_option("--nuisance-scale", synth.nuisance_scale)->capture_default_str();
  cmd_synth->add_option("--predictive-scale", synth.predictive_scale)->capture_default_str();
  cmd_synth->add_option("--head-gain", synth.head_gain)->capture_default_str();
  cmd_synth->add_option("--dictionary-floor", synth.dictionary_floor)->capture_default_str();
  cmd_synth->add_flag("--float32", synth_float32, "Store activations as float32");
  cmd_synth->add_option("--seed", synth.seed, "Random seed")->capture_default_str();

  // factorize
  CommonOptions fac_common;
  SolverOptions fac_solver;
  auto* cmd_fac = app.add_subcommand("factorize", "Factorize a bundle into U.npy and W.npy");
  cmd_fac->add_option("--bundle", fac_common.bundle, "Bundle directory")->required();
  cmd_fac->add_option("--out", fac_common.out, "Output directory")->required();
  cmd_fac->add_option("--seed", fac_common.seed, "Initialization seed")->capture_default_str();
  add_solver_options(cmd_fac, fac_solver);

  // importance
  CommonOptions imp_common;
  SobolOptions imp_sobol;
  std::string imp_factors;
  auto* cmd_imp = app.add_subcommand("importance", "Total Sobol indices of the concepts");
  cmd_imp->add_option("--bundle", imp_common.bundle, "Bundle directory")->required();
  cmd_imp->add_option("--factors", imp_factors, "Directory written by factorize")->required();
  cmd_imp->add_option("--out", imp_common.out, "Output file (default <factors>/importance.json)");
  cmd_imp->add_option("--seed", imp_common.seed, "Design seed")->capture_default_str();
  add_sobol_options(cmd_imp, imp_sobol);

  // evaluate
  CommonOptions eval_common;
  SobolOptions eval_sobol;
  std::string eval_factors;
  std::string eval_importance;
  auto* cmd_eval = app.add_subcommand("evaluate", "Metric suite for a factorization");
  cmd_eval->add_option("--bundle", eval_common.bundle, "Bundle directory")->required();
  cmd_eval->add_option("--factors", eval_factors, "Directory written by factorize")->required();
  cmd_eval->add_option("--importance", eval_importance, "importance.json (computed when omitted)");
  cmd_eval->add_option("--out", eval_common.out, "Output directory")->required();
  cmd_eval->add_option("--seed", eval_common.seed, "Design seed when importance is computed")
      ->capture_default_str();
  add_sobol_options(cmd_eval, eval_sobol);

  // sweep
  CommonOptions sweep_common;
  SolverOptions sweep_solver;
  SobolOptions sweep_sobol;
  std::string sweep_param = "lambda";
  std::vector<double> sweep_values;
  int sweep_repeats = 1;
  int sweep_jobs = 1;
  auto* cmd_sweep = app.add_subcommand("sweep", "Run the pipeline over a range of lambda or rank values");
  cmd_sweep->add_option("--bundle", sweep_common.bundle, "Bundle directory")->required();
  cmd_sweep->add_option("--out", sweep_common.out, "Output directory")->required();
  cmd_sweep->add_option("--param", sweep_param, "lambda or rank")->capture_default_str();
  cmd_sweep->add_option("--values", sweep_values, "Comma separated, increasing")->delimiter(',');
  cmd_sweep->add_option("--repeats", sweep_repeats, "Seed-varied runs per value")->capture_default_str();
  cmd_sweep->add_option("--jobs", sweep_jobs, "Concurrent runs")->capture_default_str();
  cmd_sweep->add_option("--seed", sweep_common.seed, "Base seed")->capture_default_str();
  add_solver_options(cmd_sweep, sweep_solver);
  add_sobol_options(cmd_sweep, sweep_sobol);

  // report
  CommonOptions rep_common;
  SolverOptions rep_solver;
  SobolOptions rep_sobol;
  auto* cmd_rep = app.add_subcommand("report", "Factorize, score concepts and evaluate in one run");
  cmd_rep->add_option("--bundle", rep_common.bundle, "Bundle directory")->required();
  cmd_rep->add_option("--out", rep_common.out, "Output directory")->required();
  cmd_rep->add_option("--seed", rep_common.seed, "Seed for initialization and designs")->capture_default_str();
  add_solver_options(cmd_rep, rep_solver);
  add_sobol_options(cmd_rep, rep_sobol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*cmd_synth) {
      synth.adversarial_variance = synth_adversarial ? 1 : 0;
      Bundle bundle;
      check(face_bundle_synthesize(&synth, bundle.out()), "synth");
      check(face_bundle_save(bundle.get(), synth_out.c_str(), synth_float32 ? 1 : 0), "synth");
      int64_t n = 0, p = 0, c = 0;
      face_bundle_shape(bundle.get(), &n, &p, &c);
      std::printf("wrote %s: n=%lld p=%lld classes=%lld\n", synth_out.c_str(), static_cast<long long>(n),
                  static_cast<long long>(p), static_cast<long long>(c));
    } else if (*cmd_fac) {
      face_pipeline_config cfg;
      face_pipeline_config_default(&cfg);
      apply(fac_solver, fac_common.seed, cfg);
      Bundle bundle;
      check(face_bundle_load(fac_common.bundle.c_str(), bundle.out()), "loading bundle");
      Factors factors;
      check(face_factorize(bundle.get(), &cfg, factors.out()), "factorize");
      check(face_factors_save(factors.get(), fac_common.out.c_str()), "writing factors");
      face_solve_summary summary;
      check(face_factors_summary(factors.get(), &summary), "factorize");
      print_summary(summary);
    } else if (*cmd_imp) {
      face_pipeline_config cfg;
      face_pipeline_config_default(&cfg);
      apply(imp_sobol, imp_common.seed, cfg.sobol);
      Bundle bundle;
      check(face_bundle_load(imp_common.bundle.c_str(), bundle.out()), "loading bundle");
      Factors factors;
      check(face_factors_load(imp_factors.c_str(), factors.out()), "loading factors");
      Importance importance;
      check(face_importance_compute(bundle.get(), factors.get(), &cfg.sobol, importance.out()), "importance");
      const std::string out = imp_common.out.empty() ? imp_factors + "/importance.json" : imp_common.out;
      check(face_importance_save(importance.get(), out.c_str()), "writing importance");
      std::vector<double> normalized(static_cast<std::size_t>(face_importance_size(importance.get())));
      check(face_importance_copy_normalized(importance.get(), normalized.data(), normalized.size()),
            "importance");
      for (std::size_t i = 0; i < normalized.size(); ++i) std::printf("concept %zu  %.6f\n", i, normalized[i]);
    } else if (*cmd_eval) {
      Bundle bundle;
      check(face_bundle_load(eval_common.bundle.c_str(), bundle.out()), "loading bundle");
      Factors factors;
      check(face_factors_load(eval_factors.c_str(), factors.out()), "loading factors");
      Importance importance;
      if (eval_importance.empty()) {
        face_pipeline_config cfg;
        face_pipeline_config_default(&cfg);
        apply(eval_sobol, eval_common.seed, cfg.sobol);
        check(face_importance_compute(bundle.get(), factors.get(), &cfg.sobol, importance.out()), "importance");
      } else {
        check(face_importance_load(eval_importance.c_str(), importance.out()), "loading importance");
      }
      Evaluation evaluation;
      check(face_evaluate(bundle.get(), factors.get(), importance.get(), evaluation.out()), "evaluate");
      check(face_evaluation_save(evaluation.get(), eval_common.out.c_str()), "writing report");
      face_metrics metrics;
      check(face_evaluation_metrics(evaluation.get(), &metrics), "evaluate");
      print_metrics(metrics);
    } else if (*cmd_sweep) {
      face_sweep_config cfg;
      face_sweep_config_default(&cfg);
      check(face_parse_sweep_parameter(sweep_param.c_str(), &cfg.parameter), "--param");
      apply(sweep_solver, sweep_common.seed, cfg.base);
      apply(sweep_sobol, sweep_common.seed, cfg.base.sobol);
      if (sweep_values.empty()) sweep_values = default_sweep_values(cfg.parameter);
      cfg.values = sweep_values.data();
      cfg.value_count = sweep_values.size();
      cfg.repeats = sweep_repeats;
      cfg.jobs = sweep_jobs;
      Bundle bundle;
      check(face_bundle_load(sweep_common.bundle.c_str(), bundle.out()), "loading bundle");
      Sweep sweep;
      check(face_sweep_run(bundle.get(), &cfg, sweep.out()), "sweep");
      check(face_sweep_save(sweep.get(), sweep_common.out.c_str()), "writing sweep");
      std::printf("%-12s %6s %10s %10s %10s %10s %12s\n", sweep_param.c_str(), "fail", "accuracy", "c_ins",
                  "c_del", "c_gini", "d_kl");
      for (std::size_t i = 0; i < face_sweep_row_count(sweep.get()); ++i) {
        face_sweep_row row;
        check(face_sweep_get_row(sweep.get(), i, &row), "sweep");
        std::printf("%-12g %6d %10.4f %10.4f %10.4f %10.4f %12.4g\n", row.value, row.failures,
                    row.accuracy_mean, row.c_ins_mean, row.c_del_mean, row.c_gini_mean, row.d_kl_mean);
      }
    } else if (*cmd_rep) {
      face_pipeline_config cfg;
      face_pipeline_config_default(&cfg);
      apply(rep_solver, rep_common.seed, cfg);
      apply(rep_sobol, rep_common.seed, cfg.sobol);
      Bundle bundle;
      check(face_bundle_load(rep_common.bundle.c_str(), bundle.out()), "loading bundle");
      Pipeline result;
      check(face_pipeline_run(bundle.get(), &cfg, result.out()), "report");
      check(face_pipeline_save(result.get(), rep_common.out.c_str()), "writing report");
      face_solve_summary summary;
      check(face_pipeline_summary(result.get(), &summary), "report");
      face_metrics metrics;
      check(face_pipeline_metrics(result.get(), &metrics), "report");
      print_summary(summary);
      print_metrics(metrics);
    }
  } catch (const Failure& f) {
    return exit_code(f.status);
  }
  return 0;
}
