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

#include "face/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "face/error.hpp"

namespace face {
namespace {

void check_coefficients(const Matrix& u, const Matrix& w, const LinearHead& head,
                        const LabelVector& labels) {
  if (u.cols() != w.cols()) throw_shape("U and W ranks differ");
  if (w.rows() != head.num_features()) throw_shape("dictionary width does not match the head");
  check_labels(labels, u.rows(), head.num_classes());
}

// Accuracy of the head on (U .* M_k) W^T where M_k keeps the columns flagged in
// `keep`.
double masked_accuracy(const Matrix& u, const Matrix& w, const LinearHead& head,
                       const LabelVector& labels, const std::vector<char>& keep) {
  Matrix masked = u;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    if (!keep[static_cast<std::size_t>(k)]) masked.col(k).setZero();
  }
  return accuracy(head, masked * w.transpose(), labels);
}

}  // namespace

void check_permutation(const std::vector<int>& order, Eigen::Index r) {
  if (static_cast<Eigen::Index>(order.size()) != r) {
    throw_config("concept order has " + std::to_string(order.size()) + " entries, expected " +
                 std::to_string(r));
  }
  std::vector<char> seen(order.size(), 0);
  for (const int k : order) {
    if (k < 0 || k >= r || seen[static_cast<std::size_t>(k)]) {
      throw_config("concept order is not a permutation");
    }
    seen[static_cast<std::size_t>(k)] = 1;
  }
}

double reconstruction_mse(const ActivationMatrix& a, const FactorPair& factors) {
  validate_factors(factors, a.rows(), a.cols());
  return (a.data() - factors.reconstruct()).squaredNorm() /
         static_cast<double>(a.rows() * a.cols());
}

double prediction_consistency(const ActivationMatrix& a, const FactorPair& factors,
                              const LinearHead& head) {
  validate_factors(factors, a.rows(), a.cols());
  return kl_divergence(predict(head, a.data()), predict(head, factors.reconstruct()));
}

ConceptCurveScore concept_deletion(const Matrix& u, const Matrix& w, const LinearHead& head,
                                   const LabelVector& labels, const std::vector<int>& order) {
  check_coefficients(u, w, head, labels);
  const Eigen::Index r = u.cols();
  check_permutation(order, r);

  ConceptCurveScore out;
  std::vector<char> keep(static_cast<std::size_t>(r), 1);
  for (Eigen::Index k = 0; k <= r; ++k) {
    if (k > 0) keep[static_cast<std::size_t>(order[static_cast<std::size_t>(k - 1)])] = 0;
    out.curve.k_values.push_back(static_cast<int>(k));
    out.curve.accuracies.push_back(masked_accuracy(u, w, head, labels, keep));
  }
  double drop = 0.0;
  for (std::size_t k = 1; k < out.curve.accuracies.size(); ++k) {
    drop += out.curve.accuracies[0] - out.curve.accuracies[k];
  }
  out.score = drop / static_cast<double>(r + 1);
  return out;
}

ConceptCurveScore concept_insertion(const Matrix& u, const Matrix& w, const LinearHead& head,
                                    const LabelVector& labels, const std::vector<int>& order) {
  check_coefficients(u, w, head, labels);
  const Eigen::Index r = u.cols();
  check_permutation(order, r);

  ConceptCurveScore out;
  std::vector<char> keep(static_cast<std::size_t>(r), 0);
  for (Eigen::Index k = 0; k <= r; ++k) {
    if (k > 0) keep[static_cast<std::size_t>(order[static_cast<std::size_t>(k - 1)])] = 1;
    out.curve.k_values.push_back(static_cast<int>(k));
    out.curve.accuracies.push_back(masked_accuracy(u, w, head, labels, keep));
  }
  double area = 0.0;
  for (std::size_t k = 1; k < out.curve.accuracies.size(); ++k) {
    area += 0.5 * (out.curve.accuracies[k - 1] + out.curve.accuracies[k]);
  }
  out.score = area / static_cast<double>(r);
  return out;
}

double gini_complexity(const Vector& importance, std::vector<std::string>* warnings) {
  if (importance.size() == 0) throw_shape("empty importance vector");
  if (importance.minCoeff() < 0.0 || !importance.allFinite()) {
    throw_domain("importance scores must be finite and non-negative");
  }
  const double total = importance.sum();
  if (total <= 0.0) {
    if (warnings != nullptr) warnings->push_back("gini undefined for all-zero importance; using 0");
    return 0.0;
  }
  std::vector<double> sorted(importance.data(), importance.data() + importance.size());
  std::sort(sorted.begin(), sorted.end());
  const double r = static_cast<double>(sorted.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    acc += (2.0 * static_cast<double>(i + 1) - r - 1.0) * sorted[i];
  }
  return acc / (r * total);
}

double gini_complexity(const ImportanceVector& importance, std::vector<std::string>* warnings) {
  return gini_complexity(importance.total_indices, warnings);
}

FailureCaseReport failure_case_report(const ActivationMatrix& a, const FactorPair& factors,
                                      const LinearHead& head, const LabelVector& labels) {
  validate_factors(factors, a.rows(), a.cols());
  FailureCaseReport out;
  out.baseline_accuracy = accuracy(head, a.data(), labels);
  if (out.baseline_accuracy < 1.0) {
    out.warnings.push_back("head accuracy on the original activations is " +
                           std::to_string(out.baseline_accuracy) +
                           " (< 1); reconstructed accuracy is not comparable");
  }
  const Matrix recon = factors.reconstruct();
  out.accuracy_on_recon = accuracy(head, recon, labels);
  out.mse = reconstruction_mse(a, factors);
  out.d_kl = kl_divergence(predict(head, a.data()), predict(head, recon));
  return out;
}

EvaluationReport evaluate(const ActivationMatrix& a, const FactorPair& factors,
                          const LinearHead& head, const LabelVector& labels,
                          const ImportanceVector& importance) {
  validate_factors(factors, a.rows(), a.cols());
  if (importance.total_indices.size() != factors.rank()) {
    throw_shape("importance length does not match the rank");
  }
  EvaluationReport out;
  const FailureCaseReport failure = failure_case_report(a, factors, head, labels);
  out.mse = failure.mse;
  out.recon_accuracy = failure.accuracy_on_recon;
  out.baseline_accuracy = failure.baseline_accuracy;
  out.warnings = failure.warnings;

  const PinskerCheck pinsker = pinsker_check(predict(head, a.data()), predict(head, factors.reconstruct()));
  out.d_kl = pinsker.kl;
  out.l1_dist = pinsker.l1_dist;
  out.pinsker_bound = pinsker.bound;
  out.pinsker_margin = pinsker.bound - pinsker.l1_dist;

  const std::vector<int> order = rank_concepts(importance);
  auto deletion = concept_deletion(factors.u, factors.w, head, labels, order);
  auto insertion = concept_insertion(factors.u, factors.w, head, labels, order);
  out.c_del = deletion.score;
  out.c_ins = insertion.score;
  out.deletion_curve = std::move(deletion.curve);
  out.insertion_curve = std::move(insertion.curve);
  out.c_gini = gini_complexity(importance, &out.warnings);
  if (importance.degenerate_samples > 0) {
    out.warnings.push_back(std::to_string(importance.degenerate_samples) +
                           " samples had constant output over the Sobol designs");
  }
  return out;
}

}  // namespace face
