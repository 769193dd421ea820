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

#ifndef FACE_METRICS_HPP_
#define FACE_METRICS_HPP_

#include <string>
#include <vector>

#include "face/core.hpp"
#include "face/importance.hpp"

namespace face {

// Accuracy after masking k concepts, k = 0..r.
struct AccuracyCurve {
  std::vector<int> k_values;
  std::vector<double> accuracies;
};

struct ConceptCurveScore {
  double score = 0.0;
  AccuracyCurve curve;
};

struct EvaluationReport {
  double mse = 0.0;
  double d_kl = 0.0;
  double l1_dist = 0.0;
  double pinsker_bound = 0.0;
  double pinsker_margin = 0.0;  // bound - l1
  double recon_accuracy = 0.0;
  double baseline_accuracy = 0.0;
  double c_del = 0.0;
  double c_ins = 0.0;
  double c_gini = 0.0;
  AccuracyCurve deletion_curve;
  AccuracyCurve insertion_curve;
  std::vector<std::string> warnings;
};

// (1 / (n p)) * ||A - U W^T||_F^2
double reconstruction_mse(const ActivationMatrix& a, const FactorPair& factors);

// Mean-row KL(predict(A) || predict(U W^T)).
double prediction_consistency(const ActivationMatrix& a, const FactorPair& factors,
                              const LinearHead& head);

// Zeroes the leading k concepts of `order` for k = 0..r. The score is
// (1 / (r + 1)) * sum_{k=1..r} (acc_0 - acc_k).
ConceptCurveScore concept_deletion(const Matrix& u, const Matrix& w, const LinearHead& head,
                                   const LabelVector& labels, const std::vector<int>& order);

// Inserts the leading k concepts of `order` into an empty code for k = 0..r.
// The score is the trapezoidal area under the curve divided by r.
ConceptCurveScore concept_insertion(const Matrix& u, const Matrix& w, const LinearHead& head,
                                    const LabelVector& labels, const std::vector<int>& order);

// Gini sparsity of the importance scores. Returns 0 and appends a warning when
// all scores are zero.
double gini_complexity(const Vector& importance, std::vector<std::string>* warnings = nullptr);
double gini_complexity(const ImportanceVector& importance,
                       std::vector<std::string>* warnings = nullptr);

struct FailureCaseReport {
  double accuracy_on_recon = 0.0;
  double mse = 0.0;
  double d_kl = 0.0;
  double baseline_accuracy = 0.0;
  std::vector<std::string> warnings;
};

FailureCaseReport failure_case_report(const ActivationMatrix& a, const FactorPair& factors,
                                      const LinearHead& head, const LabelVector& labels);

// Full metric suite using the given concept order for deletion and insertion.
EvaluationReport evaluate(const ActivationMatrix& a, const FactorPair& factors,
                          const LinearHead& head, const LabelVector& labels,
                          const ImportanceVector& importance);

// Throws unless `order` is a permutation of [0, r).
void check_permutation(const std::vector<int>& order, Eigen::Index r);

}  // namespace face

#endif  // FACE_METRICS_HPP_
