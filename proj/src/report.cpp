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

#include "face/report.hpp"

#include <cmath>
#include <cstdio>

#include "face/error.hpp"
#include "face/npy.hpp"

namespace face {
namespace {

using nlohmann::json;

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json curve_json(const AccuracyCurve& c) {
  return json{{"k", c.k_values}, {"accuracy", c.accuracies}};
}

json parse_json_file(const std::filesystem::path& path) {
  const std::vector<std::byte> bytes = read_file(path);
  try {
    return json::parse(reinterpret_cast<const char*>(bytes.data()),
                       reinterpret_cast<const char*>(bytes.data()) + bytes.size());
  } catch (const json::parse_error& e) {
    throw Error(FormatReason::kBadHeader, path.string() + ": " + e.what());
  }
}

json mean_std_json(const MeanStd& m) { return json{{"mean", m.mean}, {"std", m.std}}; }

template <typename Enum>
Enum parse_enum(std::string_view s, std::initializer_list<std::pair<std::string_view, Enum>> table,
                const char* what) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  throw_config(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

}  // namespace

std::string to_string(Optimizer v) { return v == Optimizer::kPgd ? "pgd" : "adam"; }
std::string to_string(LossVariant v) {
  switch (v) {
    case LossVariant::kForwardKl: return "forward_kl";
    case LossVariant::kReverseKl: return "reverse_kl";
    case LossVariant::kLogitMse: return "logit_mse";
  }
  return "?";
}
std::string to_string(InitMethod v) { return v == InitMethod::kNndsvd ? "nndsvd" : "random"; }
std::string to_string(DesignSequence v) {
  return v == DesignSequence::kSobol ? "sobol_lds" : "latin_hypercube";
}
std::string to_string(SobolOutput v) {
  return v == SobolOutput::kClassLogit ? "class_logit" : "class_prob";
}
std::string to_string(FactorizationMethod v) {
  return v == FactorizationMethod::kFace ? "face" : "multiplicative";
}
std::string to_string(SweepParameter v) { return v == SweepParameter::kLambda ? "lambda" : "rank"; }

Optimizer parse_optimizer(std::string_view s) {
  return parse_enum<Optimizer>(s, {{"pgd", Optimizer::kPgd}, {"adam", Optimizer::kAdam}}, "optimizer");
}
LossVariant parse_loss_variant(std::string_view s) {
  return parse_enum<LossVariant>(s,
                                 {{"forward_kl", LossVariant::kForwardKl},
                                  {"reverse_kl", LossVariant::kReverseKl},
                                  {"logit_mse", LossVariant::kLogitMse}},
                                 "loss variant");
}
InitMethod parse_init_method(std::string_view s) {
  return parse_enum<InitMethod>(s, {{"nndsvd", InitMethod::kNndsvd}, {"random", InitMethod::kRandom}},
                                "init method");
}
DesignSequence parse_design_sequence(std::string_view s) {
  return parse_enum<DesignSequence>(
      s, {{"sobol_lds", DesignSequence::kSobol}, {"latin_hypercube", DesignSequence::kLatinHypercube}},
      "design sequence");
}
SobolOutput parse_sobol_output(std::string_view s) {
  return parse_enum<SobolOutput>(
      s, {{"class_logit", SobolOutput::kClassLogit}, {"class_prob", SobolOutput::kClassProb}},
      "Sobol output");
}
FactorizationMethod parse_factorization_method(std::string_view s) {
  return parse_enum<FactorizationMethod>(
      s, {{"face", FactorizationMethod::kFace}, {"multiplicative", FactorizationMethod::kMultiplicative}},
      "factorization method");
}
SweepParameter parse_sweep_parameter(std::string_view s) {
  return parse_enum<SweepParameter>(
      s, {{"lambda", SweepParameter::kLambda}, {"rank", SweepParameter::kRank}}, "sweep parameter");
}

json config_json(const PipelineConfig& cfg) {
  json solver{{"lambda", cfg.solver.lambda},
              {"optimizer", to_string(cfg.solver.optimizer)},
              {"learning_rate", cfg.solver.learning_rate},
              {"max_iterations", cfg.solver.max_iterations},
              {"stop_epsilon", cfg.solver.stop_epsilon},
              {"loss_variant", to_string(cfg.solver.loss_variant)}};
  if (cfg.solver.auto_step_fraction) solver["auto_step_fraction"] = *cfg.solver.auto_step_fraction;
  json sobol{{"num_designs", cfg.sobol.num_designs},
             {"sequence", to_string(cfg.sobol.sequence)},
             {"seed", cfg.sobol.seed},
             {"output", to_string(cfg.sobol.output)}};
  sobol["target_class"] = cfg.sobol.target_class ? json(*cfg.sobol.target_class) : json("label");
  return json{{"rank", cfg.rank},
              {"method", to_string(cfg.method)},
              {"init", {{"method", to_string(cfg.init.method)}, {"seed", cfg.init.seed}}},
              {"solver", solver},
              {"sobol", sobol}};
}

json solve_json(const SolveResult& result) {
  return json{{"final_mse", result.final_mse},
              {"final_kl", result.final_kl},
              {"final_total_loss", result.final_total_loss},
              {"iterations", result.iterations},
              {"converged", result.converged},
              {"rank", result.factors.rank()}};
}

json importance_json(const ImportanceVector& importance) {
  return json{{"total_indices", vector_json(importance.total_indices)},
              {"normalized", vector_json(importance.normalized)},
              {"order", rank_concepts(importance)},
              {"degenerate_samples", importance.degenerate_samples}};
}

ImportanceVector importance_from_json(const json& j) {
  try {
    const auto raw = j.at("total_indices").get<std::vector<double>>();
    const Eigen::Index degenerate = j.value("degenerate_samples", Eigen::Index{0});
    return make_importance(Eigen::Map<const Vector>(raw.data(), static_cast<Eigen::Index>(raw.size())),
                           degenerate);
  } catch (const json::exception& e) {
    throw Error(FormatReason::kBadHeader, std::string("importance document: ") + e.what());
  }
}

json evaluation_json(const EvaluationReport& r) {
  return json{{"mse", r.mse},
              {"d_kl", r.d_kl},
              {"l1_dist", r.l1_dist},
              {"pinsker_bound", r.pinsker_bound},
              {"pinsker_margin", r.pinsker_margin},
              {"pinsker_holds", r.l1_dist <= r.pinsker_bound + kPinskerSlack},
              {"recon_accuracy", r.recon_accuracy},
              {"baseline_accuracy", r.baseline_accuracy},
              {"c_del", r.c_del},
              {"c_ins", r.c_ins},
              {"c_gini", r.c_gini},
              {"deletion_curve", curve_json(r.deletion_curve)},
              {"insertion_curve", curve_json(r.insertion_curve)},
              {"warnings", r.warnings}};
}

json pipeline_json(const PipelineConfig& cfg, const PipelineResult& result) {
  return json{{"config", config_json(cfg)},
              {"solve", solve_json(result.solve)},
              {"importance", importance_json(result.importance)},
              {"metrics", evaluation_json(result.report)}};
}

json sweep_json(const SweepSpec& spec, const SweepTable& table) {
  json rows = json::array();
  for (const SweepRow& row : table.rows) {
    rows.push_back({{"value", row.value},
                    {"successes", row.successes},
                    {"failures", row.failures},
                    {"accuracy", mean_std_json(row.accuracy)},
                    {"c_ins", mean_std_json(row.c_ins)},
                    {"c_del", mean_std_json(row.c_del)},
                    {"c_gini", mean_std_json(row.c_gini)},
                    {"mse", mean_std_json(row.mse)},
                    {"d_kl", mean_std_json(row.d_kl)}});
  }
  json cells = json::array();
  for (const SweepCell& cell : table.cells) {
    json c{{"value", cell.value}, {"repeat", cell.repeat}, {"seed", cell.seed}};
    if (cell.result) {
      c["solve"] = solve_json(cell.result->solve);
      c["metrics"] = evaluation_json(cell.result->report);
    } else {
      c["error"] = cell.error;
    }
    cells.push_back(std::move(c));
  }
  return json{{"parameter", to_string(table.parameter)},
              {"repeats", spec.repeats},
              {"base_config", config_json(spec.base)},
              {"rows", rows},
              {"cells", cells}};
}

std::string curves_csv(const EvaluationReport& report) {
  std::string out = "k,deletion_accuracy,insertion_accuracy\n";
  for (std::size_t i = 0; i < report.deletion_curve.k_values.size(); ++i) {
    out += std::to_string(report.deletion_curve.k_values[i]) + "," +
           number(report.deletion_curve.accuracies[i]) + "," +
           number(report.insertion_curve.accuracies[i]) + "\n";
  }
  return out;
}

std::string trace_csv(const std::vector<TracePoint>& trace) {
  std::string out = "iteration,mse,kl,total\n";
  for (const TracePoint& t : trace) {
    out += std::to_string(t.iteration) + "," + number(t.mse) + "," + number(t.kl) + "," +
           number(t.total) + "\n";
  }
  return out;
}

std::string sweep_csv(const SweepTable& table) {
  std::string out = to_string(table.parameter) +
                    ",successes,failures,accuracy_mean,accuracy_std,c_ins_mean,c_ins_std,"
                    "c_del_mean,c_del_std,c_gini_mean,c_gini_std,mse_mean,mse_std,d_kl_mean,d_kl_std\n";
  for (const SweepRow& r : table.rows) {
    out += number(r.value) + "," + std::to_string(r.successes) + "," + std::to_string(r.failures);
    for (const MeanStd* m : {&r.accuracy, &r.c_ins, &r.c_del, &r.c_gini, &r.mse, &r.d_kl}) {
      out += "," + number(m->mean) + "," + number(m->std);
    }
    out += "\n";
  }
  return out;
}

std::string render_json(const json& j) { return j.dump(2) + "\n"; }

void write_pipeline_outputs(const std::filesystem::path& dir, const PipelineConfig& cfg,
                            const PipelineResult& result) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.json", render_json(pipeline_json(cfg, result)));
  write_file_atomic(dir / "curves.csv", curves_csv(result.report));
}

void write_factor_outputs(const std::filesystem::path& dir, const PipelineConfig& cfg,
                          const SolveResult& result) {
  std::filesystem::create_directories(dir);
  save_matrix(dir / kFactorUFile, result.factors.u);
  save_matrix(dir / kFactorWFile, result.factors.w);
  write_file_atomic(dir / kSolveFile,
                    render_json(json{{"config", config_json(cfg)}, {"solve", solve_json(result)}}));
  if (!result.loss_trace.empty()) write_file_atomic(dir / kTraceFile, trace_csv(result.loss_trace));
}

SolveResult read_factor_outputs(const std::filesystem::path& dir) {
  SolveResult result;
  result.factors = FactorPair{load_matrix(dir / kFactorUFile), load_matrix(dir / kFactorWFile)};
  if (result.factors.u.cols() != result.factors.w.cols()) {
    throw Error(FormatReason::kInvalidData, "U and W have different ranks");
  }
  if ((result.factors.u.array() < 0.0).any() || (result.factors.w.array() < 0.0).any() ||
      !result.factors.u.allFinite() || !result.factors.w.allFinite()) {
    throw Error(FormatReason::kInvalidData, "factors must be finite and non-negative");
  }
  const std::filesystem::path summary = dir / kSolveFile;
  if (std::filesystem::exists(summary)) {
    try {
      const json j = parse_json_file(summary).at("solve");
      result.final_mse = j.at("final_mse").get<double>();
      result.final_kl = j.at("final_kl").get<double>();
      result.final_total_loss = j.at("final_total_loss").get<double>();
      result.iterations = j.at("iterations").get<int>();
      result.converged = j.at("converged").get<bool>();
    } catch (const json::exception& e) {
      throw Error(FormatReason::kBadHeader, summary.string() + ": " + e.what());
    }
  }
  return result;
}

void write_importance(const std::filesystem::path& path, const ImportanceVector& importance) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomic(path, render_json(importance_json(importance)));
}

ImportanceVector read_importance(const std::filesystem::path& path) {
  return importance_from_json(parse_json_file(path));
}

void write_evaluation_outputs(const std::filesystem::path& dir, const EvaluationReport& report) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.json", render_json(json{{"metrics", evaluation_json(report)}}));
  write_file_atomic(dir / "curves.csv", curves_csv(report));
}

void write_sweep_outputs(const std::filesystem::path& dir, const SweepSpec& spec,
                         const SweepTable& table) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "sweep.json", render_json(sweep_json(spec, table)));
  write_file_atomic(dir / "sweep.csv", sweep_csv(table));
}

}  // namespace face
