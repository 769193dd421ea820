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

#include "face/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "face/error.hpp"

namespace face {
namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DivergedError& e) {
    throw DivergedError(std::string(stage) + ": " + e.what(), e.trace());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat) throw Error(e.format_reason(), std::string(stage) + ": " + e.what());
    throw Error(e.code(), std::string(stage) + ": " + e.what());
  }
}

void validate_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw_config("sweep needs at least one value");
  if (spec.repeats < 1) throw_config("sweep repeats must be >= 1");
  if (spec.jobs < 1) throw_config("sweep jobs must be >= 1");
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (!(spec.values[i - 1] < spec.values[i])) throw_config("sweep values must be strictly increasing");
  }
  for (const double v : spec.values) {
    if (!std::isfinite(v)) throw_config("sweep values must be finite");
    if (spec.parameter == SweepParameter::kLambda && v < 0.0) throw_config("lambda must be >= 0");
    if (spec.parameter == SweepParameter::kRank && (v < 1.0 || v != std::floor(v))) {
      throw_config("rank values must be positive integers");
    }
  }
}

}  // namespace

SolveResult factorize(const DatasetBundle& bundle, const PipelineConfig& cfg) {
  in_stage("validate", [&] { bundle.validate(); });
  const FactorPair init = in_stage("init", [&] { return initialize(bundle.activations, cfg.rank, cfg.init); });
  return in_stage("solve", [&] {
    if (cfg.method == FactorizationMethod::kMultiplicative) {
      // Multiplicative updates cannot move a zero; fill near-zero entries with
      // mean(A) (the NNDSVDa variant).
      const double fill = bundle.activations.data().mean();
      const auto densify = [fill](const Matrix& m) -> Matrix {
        return m.unaryExpr([fill](double x) { return x > kNndsvdZeroFill ? x : fill; });
      };
      const FactorPair positive{densify(init.u), densify(init.w)};
      return solve_multiplicative(bundle.activations, positive, cfg.solver.max_iterations,
                                  cfg.solver.stop_epsilon, &bundle.head, cfg.solver.record_trace);
    }
    return solve_face(bundle.activations, bundle.head, init, cfg.solver);
  });
}

ImportanceVector concept_importance(const DatasetBundle& bundle, const FactorPair& factors,
                                    const SobolConfig& cfg) {
  return in_stage("importance", [&] {
    validate_factors(factors, bundle.activations.rows(), bundle.activations.cols());
    return jansen_total_indices(factors.u, factors.w, bundle.head, cfg, &bundle.labels);
  });
}

PipelineResult run_pipeline(const DatasetBundle& bundle, const PipelineConfig& cfg) {
  PipelineResult out;
  out.solve = factorize(bundle, cfg);
  out.importance = concept_importance(bundle, out.solve.factors, cfg.sobol);
  out.report = in_stage("evaluate", [&] {
    return evaluate(bundle.activations, out.solve.factors, bundle.head, bundle.labels, out.importance);
  });
  return out;
}

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (const double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

PipelineConfig sweep_cell_config(const SweepSpec& spec, double value, int repeat) {
  PipelineConfig cfg = spec.base;
  if (spec.parameter == SweepParameter::kLambda) {
    cfg.solver.lambda = value;
  } else {
    cfg.rank = static_cast<Eigen::Index>(value);
  }
  cfg.init.seed = spec.base.init.seed + static_cast<std::uint64_t>(repeat);
  cfg.sobol.seed = spec.base.sobol.seed + static_cast<std::uint64_t>(repeat);
  return cfg;
}

std::vector<SweepRow> aggregate_sweep(const std::vector<SweepCell>& cells) {
  std::vector<SweepRow> rows;
  std::size_t i = 0;
  while (i < cells.size()) {
    SweepRow row;
    row.value = cells[i].value;
    std::vector<double> acc, ins, del, gini, mse, kl;
    for (; i < cells.size() && cells[i].value == row.value; ++i) {
      if (!cells[i].result) {
        ++row.failures;
        continue;
      }
      ++row.successes;
      const EvaluationReport& r = cells[i].result->report;
      acc.push_back(r.recon_accuracy);
      ins.push_back(r.c_ins);
      del.push_back(r.c_del);
      gini.push_back(r.c_gini);
      mse.push_back(r.mse);
      kl.push_back(r.d_kl);
    }
    row.accuracy = mean_std(acc);
    row.c_ins = mean_std(ins);
    row.c_del = mean_std(del);
    row.c_gini = mean_std(gini);
    row.mse = mean_std(mse);
    row.d_kl = mean_std(kl);
    rows.push_back(row);
  }
  return rows;
}

SweepTable run_sweep(const DatasetBundle& bundle, const SweepSpec& spec) {
  validate_sweep(spec);
  bundle.validate();

  SweepTable table;
  table.parameter = spec.parameter;
  for (const double value : spec.values) {
    for (int rep = 0; rep < spec.repeats; ++rep) {
      SweepCell& cell = table.cells.emplace_back();
      cell.value = value;
      cell.repeat = rep;
      cell.seed = spec.base.init.seed + static_cast<std::uint64_t>(rep);
    }
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < table.cells.size(); i = next++) {
      SweepCell& cell = table.cells[i];
      try {
        cell.result = run_pipeline(bundle, sweep_cell_config(spec, cell.value, cell.repeat));
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), table.cells.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  table.rows = aggregate_sweep(table.cells);
  return table;
}

}  // namespace face
