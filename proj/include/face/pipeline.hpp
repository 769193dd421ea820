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

#ifndef FACE_PIPELINE_HPP_
#define FACE_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "face/bundle.hpp"
#include "face/importance.hpp"
#include "face/init.hpp"
#include "face/metrics.hpp"
#include "face/solver.hpp"

namespace face {

enum class FactorizationMethod { kFace, kMultiplicative };

struct PipelineConfig {
  Eigen::Index rank = 25;
  FactorizationMethod method = FactorizationMethod::kFace;
  InitConfig init;
  SolverConfig solver;
  SobolConfig sobol;
};

struct PipelineResult {
  SolveResult solve;
  ImportanceVector importance;
  EvaluationReport report;
};

// Initialization, factorization, concept importance and the metric suite.
// Errors keep their category and gain the failing stage as a message prefix.
SolveResult factorize(const DatasetBundle& bundle, const PipelineConfig& cfg);
ImportanceVector concept_importance(const DatasetBundle& bundle, const FactorPair& factors,
                                    const SobolConfig& cfg);
PipelineResult run_pipeline(const DatasetBundle& bundle, const PipelineConfig& cfg);

enum class SweepParameter { kLambda, kRank };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::kLambda;
  std::vector<double> values;
  PipelineConfig base;
  int repeats = 1;
  // Concurrent cells.
  int jobs = 1;
};

struct SweepCell {
  double value = 0.0;
  int repeat = 0;
  std::uint64_t seed = 0;
  std::optional<PipelineResult> result;
  std::string error;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single run
};

MeanStd mean_std(const std::vector<double>& xs);

struct SweepRow {
  double value = 0.0;
  int successes = 0;
  int failures = 0;
  MeanStd accuracy;
  MeanStd c_ins;
  MeanStd c_del;
  MeanStd c_gini;
  MeanStd mse;
  MeanStd d_kl;
};

struct SweepTable {
  SweepParameter parameter = SweepParameter::kLambda;
  std::vector<SweepRow> rows;
  std::vector<SweepCell> cells;  // value-major, repeat-minor
};

// Configuration used for one cell: the swept value applied to the base
// configuration, with init and Sobol seeds offset by the repeat index.
PipelineConfig sweep_cell_config(const SweepSpec& spec, double value, int repeat);

SweepTable run_sweep(const DatasetBundle& bundle, const SweepSpec& spec);

// Recomputes the per-value aggregates from the cells.
std::vector<SweepRow> aggregate_sweep(const std::vector<SweepCell>& cells);

}  // namespace face

#endif  // FACE_PIPELINE_HPP_
