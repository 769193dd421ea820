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

#include "face/core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "face/error.hpp"

namespace face {
namespace {

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void check_same_shape(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw_shape("distribution shapes differ: " + dims(p.rows(), p.cols()) + " vs " +
                dims(q.rows(), q.cols()));
  }
}

}  // namespace

ActivationMatrix::ActivationMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw_shape("activation matrix must be non-empty, got " + dims(data_.rows(), data_.cols()));
  }
  if (!data_.allFinite()) throw_domain("activation matrix contains NaN or Inf");
  if (data_.minCoeff() < 0.0) throw_domain("activation matrix contains negative entries");
}

void validate_factors(const FactorPair& factors, Eigen::Index n, Eigen::Index p) {
  if (factors.u.rows() != n || factors.w.rows() != p || factors.u.cols() != factors.w.cols()) {
    throw_shape("factor shapes " + dims(factors.u.rows(), factors.u.cols()) + " / " +
                dims(factors.w.rows(), factors.w.cols()) + " do not match " + dims(n, p));
  }
  const Eigen::Index r = factors.u.cols();
  if (r < 1 || r > std::min(n, p)) {
    throw_shape("rank " + std::to_string(r) + " outside [1, min(n, p)]");
  }
  if (!factors.u.allFinite() || !factors.w.allFinite()) throw_domain("factors are not finite");
  if (factors.u.minCoeff() < 0.0 || factors.w.minCoeff() < 0.0) {
    throw_domain("factors contain negative entries");
  }
}

LinearHead::LinearHead(Matrix weights, Vector bias)
    : weights_(std::move(weights)), bias_(std::move(bias)) {
  if (weights_.rows() < 2) throw_shape("head needs at least two classes");
  if (weights_.cols() < 1) throw_shape("head has no input features");
  if (bias_.size() != weights_.rows()) {
    throw_shape("head bias length " + std::to_string(bias_.size()) + " != classes " +
                std::to_string(weights_.rows()));
  }
  if (!weights_.allFinite() || !bias_.allFinite()) throw_domain("head parameters are not finite");
}

Matrix LinearHead::logits(const Matrix& z) const {
  if (z.cols() != weights_.cols()) {
    throw_shape("input has " + std::to_string(z.cols()) + " features, head expects " +
                std::to_string(weights_.cols()));
  }
  if (!z.allFinite()) throw_domain("head input contains NaN or Inf");
  Matrix out = z * weights_.transpose();
  out.rowwise() += bias_.transpose();
  return out;
}

PredictiveDistribution::PredictiveDistribution(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1) throw_shape("empty distribution");
  if (!probs_.allFinite()) throw_domain("distribution contains NaN or Inf");
  if (probs_.minCoeff() < 0.0 || probs_.maxCoeff() > 1.0) {
    throw_domain("probabilities outside [0, 1]");
  }
  for (Eigen::Index i = 0; i < probs_.rows(); ++i) {
    if (std::abs(probs_.row(i).sum() - 1.0) > 1e-9) {
      throw_domain("row " + std::to_string(i) + " does not sum to one");
    }
  }
}

PredictiveDistribution softmax_rows(const Matrix& logits) {
  if (!logits.allFinite()) throw_domain("logits contain NaN or Inf");
  Matrix probs(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double shift = logits.row(i).maxCoeff();
    probs.row(i) = (logits.row(i).array() - shift).exp();
    probs.row(i) /= probs.row(i).sum();
  }
  probs = probs.cwiseMax(kProbabilityFloor);
  return PredictiveDistribution(std::move(probs), PredictiveDistribution::Unchecked{});
}

PredictiveDistribution predict(const LinearHead& head, const Matrix& z) {
  return softmax_rows(head.logits(z));
}

Vector kl_rows(const Matrix& p, const Matrix& q) {
  check_same_shape(p, q);
  Vector out(p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double pj = p(i, j);
      if (pj <= 0.0) continue;
      const double qj = q(i, j);
      if (qj <= 0.0) {
        acc = std::numeric_limits<double>::infinity();
        break;
      }
      acc += pj * std::log(pj / qj);
    }
    // Rounding can leave tiny negatives when p and q agree.
    out(i) = std::max(acc, 0.0);
  }
  return out;
}

double kl_divergence(const PredictiveDistribution& p, const PredictiveDistribution& q) {
  return kl_rows(p.probs(), q.probs()).mean();
}

std::vector<PinskerCheck> pinsker_check_rows(const PredictiveDistribution& p,
                                             const PredictiveDistribution& q) {
  const Vector kl = kl_rows(p.probs(), q.probs());
  std::vector<PinskerCheck> out(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    auto& row = out[static_cast<std::size_t>(i)];
    row.l1_dist = (p.probs().row(i) - q.probs().row(i)).cwiseAbs().sum();
    row.kl = kl(i);
    row.bound = std::sqrt(2.0 * row.kl);
    row.holds = row.l1_dist <= row.bound + kPinskerSlack;
  }
  return out;
}

PinskerCheck pinsker_check(const PredictiveDistribution& p, const PredictiveDistribution& q) {
  check_same_shape(p.probs(), q.probs());
  PinskerCheck out;
  out.l1_dist = (p.probs() - q.probs()).cwiseAbs().rowwise().sum().mean();
  out.kl = kl_divergence(p, q);
  out.bound = std::sqrt(2.0 * out.kl);
  out.holds = out.l1_dist <= out.bound + kPinskerSlack;
  return out;
}

std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(static_cast<std::size_t>(m.rows()), 0);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < m.cols(); ++j) {
      if (m(i, j) > m(i, best)) best = static_cast<int>(j);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

void check_labels(const LabelVector& labels, Eigen::Index n, Eigen::Index num_classes) {
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw_shape("label count " + std::to_string(labels.size()) + " != rows " + std::to_string(n));
  }
  for (const int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw_domain("label " + std::to_string(y) + " outside [0, " + std::to_string(num_classes) +
                   ")");
    }
  }
}

double accuracy(const LinearHead& head, const Matrix& z, const LabelVector& labels) {
  check_labels(labels, z.rows(), head.num_classes());
  const auto predicted = argmax_rows(head.logits(z));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace face
