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

#ifndef FACE_CORE_HPP_
#define FACE_CORE_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace face {

// Row-major so that a matrix maps directly onto a C-order array file.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using LabelVector = std::vector<int>;

// Probabilities are floored here before any logarithm is taken.
inline constexpr double kProbabilityFloor = 1e-30;

// Non-negative, finite activation matrix (samples x features).
class ActivationMatrix {
 public:
  explicit ActivationMatrix(Matrix data);

  const Matrix& data() const noexcept { return data_; }
  Eigen::Index rows() const noexcept { return data_.rows(); }
  Eigen::Index cols() const noexcept { return data_.cols(); }

 private:
  Matrix data_;
};

// Non-negative factors with A ~ U * W^T; U is n x r, W is p x r.
struct FactorPair {
  Matrix u;
  Matrix w;

  Eigen::Index rank() const noexcept { return u.cols(); }
  Matrix reconstruct() const { return u * w.transpose(); }
};

// Throws a shape error unless U and W agree on the rank and match (n, p), and a
// domain error if any entry is negative or non-finite.
void validate_factors(const FactorPair& factors, Eigen::Index n, Eigen::Index p);

// Frozen affine classifier head: logits = z * weights^T + bias.
class LinearHead {
 public:
  LinearHead(Matrix weights, Vector bias);

  const Matrix& weights() const noexcept { return weights_; }
  const Vector& bias() const noexcept { return bias_; }
  Eigen::Index num_classes() const noexcept { return weights_.rows(); }
  Eigen::Index num_features() const noexcept { return weights_.cols(); }

  Matrix logits(const Matrix& z) const;

 private:
  Matrix weights_;
  Vector bias_;
};

// Row-stochastic matrix of class probabilities.
class PredictiveDistribution {
 public:
  // Validates that each row is a probability vector (entries in [0, 1], row
  // sums within 1e-9 of one).
  explicit PredictiveDistribution(Matrix probs);

  const Matrix& probs() const noexcept { return probs_; }
  Eigen::Index rows() const noexcept { return probs_.rows(); }
  Eigen::Index cols() const noexcept { return probs_.cols(); }

 private:
  struct Unchecked {};
  PredictiveDistribution(Matrix probs, Unchecked) : probs_(std::move(probs)) {}
  friend PredictiveDistribution softmax_rows(const Matrix& logits);

  Matrix probs_;
};

// Numerically stable row-wise softmax, floored at kProbabilityFloor.
PredictiveDistribution softmax_rows(const Matrix& logits);

PredictiveDistribution predict(const LinearHead& head, const Matrix& z);

// Per-row KL(p || q) with 0 * ln 0 = 0. A row where q is exactly zero and p is
// positive yields +infinity.
Vector kl_rows(const Matrix& p, const Matrix& q);

// Mean over rows of KL(p || q).
double kl_divergence(const PredictiveDistribution& p, const PredictiveDistribution& q);

struct PinskerCheck {
  double l1_dist = 0.0;
  double kl = 0.0;
  double bound = 0.0;
  bool holds = true;
};

inline constexpr double kPinskerSlack = 1e-9;

// Mean-row total variation (as an L1 distance) against sqrt(2 * mean KL).
PinskerCheck pinsker_check(const PredictiveDistribution& p, const PredictiveDistribution& q);
std::vector<PinskerCheck> pinsker_check_rows(const PredictiveDistribution& p,
                                             const PredictiveDistribution& q);

// Index of the largest entry per row; ties go to the smallest index.
std::vector<int> argmax_rows(const Matrix& m);

double accuracy(const LinearHead& head, const Matrix& z, const LabelVector& labels);

void check_labels(const LabelVector& labels, Eigen::Index n, Eigen::Index num_classes);

}  // namespace face

#endif  // FACE_CORE_HPP_
