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

#ifndef FACE_REPORT_HPP_
#define FACE_REPORT_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "face/pipeline.hpp"

namespace face {

// Names used on the command line and in reports.
std::string to_string(Optimizer v);
std::string to_string(LossVariant v);
std::string to_string(InitMethod v);
std::string to_string(DesignSequence v);
std::string to_string(SobolOutput v);
std::string to_string(FactorizationMethod v);
std::string to_string(SweepParameter v);

Optimizer parse_optimizer(std::string_view s);
LossVariant parse_loss_variant(std::string_view s);
InitMethod parse_init_method(std::string_view s);
DesignSequence parse_design_sequence(std::string_view s);
SobolOutput parse_sobol_output(std::string_view s);
FactorizationMethod parse_factorization_method(std::string_view s);
SweepParameter parse_sweep_parameter(std::string_view s);

nlohmann::json config_json(const PipelineConfig& cfg);
nlohmann::json solve_json(const SolveResult& result);
nlohmann::json importance_json(const ImportanceVector& importance);
ImportanceVector importance_from_json(const nlohmann::json& j);
nlohmann::json evaluation_json(const EvaluationReport& report);
nlohmann::json pipeline_json(const PipelineConfig& cfg, const PipelineResult& result);
nlohmann::json sweep_json(const SweepSpec& spec, const SweepTable& table);

// k, deletion accuracy, insertion accuracy.
std::string curves_csv(const EvaluationReport& report);
std::string trace_csv(const std::vector<TracePoint>& trace);
std::string sweep_csv(const SweepTable& table);

// report.json and curves.csv.
void write_pipeline_outputs(const std::filesystem::path& dir, const PipelineConfig& cfg,
                            const PipelineResult& result);
inline constexpr const char* kFactorUFile = "U.npy";
inline constexpr const char* kFactorWFile = "W.npy";
inline constexpr const char* kSolveFile = "solve.json";
inline constexpr const char* kTraceFile = "trace.csv";

// U.npy, W.npy, solve.json and trace.csv when a trace was recorded.
void write_factor_outputs(const std::filesystem::path& dir, const PipelineConfig& cfg,
                          const SolveResult& result);
// Factors plus the summary fields of solve.json when present.
SolveResult read_factor_outputs(const std::filesystem::path& dir);

void write_importance(const std::filesystem::path& path, const ImportanceVector& importance);
ImportanceVector read_importance(const std::filesystem::path& path);

// report.json (metrics only) and curves.csv.
void write_evaluation_outputs(const std::filesystem::path& dir, const EvaluationReport& report);

// sweep.json and sweep.csv.
void write_sweep_outputs(const std::filesystem::path& dir, const SweepSpec& spec,
                         const SweepTable& table);

// Stable textual form of a JSON document (two-space indent, trailing newline).
std::string render_json(const nlohmann::json& j);

}  // namespace face

#endif  // FACE_REPORT_HPP_
