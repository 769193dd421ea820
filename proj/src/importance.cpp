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

#include "face/importance.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "face/error.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace face {
namespace {

struct DirectionEntry {
  unsigned polynomial;
  std::array<unsigned, 10> initial;
};

constexpr DirectionEntry kDirections[] = {
#include "sobol_directions.inc"
};
static_assert(std::size(kDirections) == kMaxSobolDimensions);

constexpr int kBits = 32;

std::array<std::uint32_t, kBits> direction_numbers(int dim) {
  std::array<std::uint64_t, kBits> m{};
  if (dim == 0) {
    m.fill(1);
  } else {
    const unsigned poly = kDirections[dim].polynomial;
    const int degree = std::bit_width(poly) - 1;
    for (int j = 0; j < degree; ++j) m[j] = kDirections[dim].initial[j];
    for (int j = degree; j < kBits; ++j) {
      std::uint64_t next = m[j - degree];
      std::uint64_t pow2 = 1;
      for (int k = 0; k < degree; ++k) {
        pow2 <<= 1;
        if ((poly >> (degree - 1 - k)) & 1U) next ^= pow2 * m[j - k - 1];
      }
      m[j] = next;
    }
  }
  std::array<std::uint32_t, kBits> v{};
  for (int j = 0; j < kBits; ++j) v[j] = static_cast<std::uint32_t>(m[j] << (kBits - 1 - j));
  return v;
}

// Population variance.
double variance(const Vector& x) { return (x.array() - x.mean()).square().mean(); }

bool negligible_variance(double var, const Vector& values) {
  return !(var > 1e-20 * std::max(1.0, values.squaredNorm() / static_cast<double>(values.size())));
}

Matrix design_points(Eigen::Index count, int dims, const SobolConfig& cfg) {
  if (cfg.sequence == DesignSequence::kSobol) return sobol_points(count, dims, cfg.seed);
  return latin_hypercube(count, dims, cfg.seed);
}

}  // namespace

Matrix sobol_points(Eigen::Index count, int dims, std::uint64_t shift_seed) {
  if (dims < 1 || dims > kMaxSobolDimensions) {
    throw_config("Sobol sequence supports 1.." + std::to_string(kMaxSobolDimensions) +
                 " dimensions, got " + std::to_string(dims));
  }
  if (count < 0 || count > (Eigen::Index{1} << 31)) throw_config("invalid Sobol point count");
  std::vector<std::array<std::uint32_t, kBits>> directions;
  std::vector<std::uint32_t> shift(static_cast<std::size_t>(dims), 0);
  detail::Rng rng(shift_seed);
  for (int d = 0; d < dims; ++d) {
    directions.push_back(direction_numbers(d));
    if (shift_seed != 0) shift[static_cast<std::size_t>(d)] = static_cast<std::uint32_t>(rng.bits() >> 32);
  }

  Matrix out(count, dims);
  std::vector<std::uint32_t> state(static_cast<std::size_t>(dims), 0);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (i > 0) {
      // Gray-code order: flip the direction number of the lowest zero bit of i-1.
      const int c = std::countr_one(static_cast<std::uint64_t>(i - 1));
      for (int d = 0; d < dims; ++d) state[static_cast<std::size_t>(d)] ^= directions[static_cast<std::size_t>(d)][c];
    }
    for (int d = 0; d < dims; ++d) {
      const auto bits = state[static_cast<std::size_t>(d)] ^ shift[static_cast<std::size_t>(d)];
      out(i, d) = static_cast<double>(bits) * 0x1.0p-32;
    }
  }
  return out;
}

Matrix latin_hypercube(Eigen::Index count, int dims, std::uint64_t seed) {
  if (dims < 1 || count < 1) throw_config("latin hypercube needs positive count and dims");
  detail::Rng rng(seed);
  Matrix out(count, dims);
  std::vector<Eigen::Index> strata(static_cast<std::size_t>(count));
  for (int d = 0; d < dims; ++d) {
    std::iota(strata.begin(), strata.end(), Eigen::Index{0});
    for (std::size_t i = strata.size(); i > 1; --i) {
      std::swap(strata[i - 1], strata[rng.below(i)]);
    }
    for (Eigen::Index i = 0; i < count; ++i) {
      out(i, d) = (static_cast<double>(strata[static_cast<std::size_t>(i)]) + rng.uniform()) /
                  static_cast<double>(count);
    }
  }
  return out;
}

void validate(const SobolConfig& cfg) {
  if (cfg.num_designs < 8) throw_config("num_designs must be >= 8");
  if (cfg.sequence == DesignSequence::kSobol && !std::has_single_bit(static_cast<std::uint64_t>(cfg.num_designs))) {
    throw_config("num_designs must be a power of two for the Sobol sequence");
  }
}

double masked_output(const Vector& u_row, const Vector& mask, const Matrix& w,
                     const LinearHead& head, int target_class, SobolOutput output) {
  if (u_row.size() != w.cols() || mask.size() != w.cols()) {
    throw_shape("coefficient, mask and dictionary ranks differ");
  }
  if (target_class < 0 || target_class >= head.num_classes()) {
    throw_config("target class " + std::to_string(target_class) + " out of range");
  }
  const Matrix activation = (u_row.cwiseProduct(mask)).transpose() * w.transpose();
  if (output == SobolOutput::kClassLogit) return head.logits(activation)(0, target_class);
  return predict(head, activation).probs()(0, target_class);
}

TotalIndexEstimate jansen_total_indices(const DesignFunction& f, int dims, const SobolConfig& cfg) {
  validate(cfg);
  const Eigen::Index n = cfg.num_designs;
  const Matrix points = design_points(n, 2 * dims, cfg);
  const Matrix design_a = points.leftCols(dims);
  const Matrix design_b = points.rightCols(dims);

  const auto eval = [&](const Matrix& design, Eigen::Index row) {
    const Eigen::VectorXd x = design.row(row).transpose();
    return f(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  };

  Vector fa(n);
  for (Eigen::Index j = 0; j < n; ++j) fa(j) = eval(design_a, j);
  TotalIndexEstimate out;
  out.indices = Vector::Zero(dims);
  out.variance = variance(fa);
  if (negligible_variance(out.variance, fa)) {
    out.degenerate = true;
    return out;
  }
  Matrix design_c = design_a;
  for (int i = 0; i < dims; ++i) {
    design_c.col(i) = design_b.col(i);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double diff = fa(j) - eval(design_c, j);
      acc += diff * diff;
    }
    design_c.col(i) = design_a.col(i);
    out.indices(i) = std::max(0.0, acc / (2.0 * static_cast<double>(n)) / out.variance);
  }
  return out;
}

ImportanceVector make_importance(Vector total_indices, Eigen::Index degenerate_samples) {
  ImportanceVector out;
  out.total_indices = total_indices.cwiseMax(0.0);
  out.degenerate_samples = degenerate_samples;
  const double sum = out.total_indices.sum();
  out.normalized = sum > 0.0 ? Vector(out.total_indices / sum) : Vector::Zero(total_indices.size());
  return out;
}

ImportanceVector jansen_total_indices(const Matrix& u, const Matrix& w, const LinearHead& head,
                                      const SobolConfig& cfg, const LabelVector* labels) {
  validate(cfg);
  if (u.cols() != w.cols()) throw_shape("U and W ranks differ");
  if (w.rows() != head.num_features()) throw_shape("dictionary width does not match the head");
  if (cfg.target_class) {
    if (*cfg.target_class < 0 || *cfg.target_class >= head.num_classes()) {
      throw_config("target class out of range");
    }
  } else {
    if (labels == nullptr) throw_config("per-sample targets require labels");
    check_labels(*labels, u.rows(), head.num_classes());
  }

  const int r = static_cast<int>(u.cols());
  const Eigen::Index n_designs = cfg.num_designs;
  const Matrix points = design_points(n_designs, 2 * r, cfg);
  const Matrix design_a = points.leftCols(r);
  const Matrix design_b = points.rightCols(r);

  // Logits of a masked sample are affine in the mask: (m .* u) (W_h W)^T + b.
  const Matrix head_dictionary = head.weights() * w;  // c x r
  const Vector& bias = head.bias();

  const auto outputs = [&](const Matrix& design, const Vector& u_row, int target) {
    Matrix logits = design * u_row.asDiagonal() * head_dictionary.transpose();
    logits.rowwise() += bias.transpose();
    if (cfg.output == SobolOutput::kClassLogit) return Vector(logits.col(target));
    return Vector(softmax_rows(logits).probs().col(target));
  };

  const auto rows = static_cast<std::size_t>(u.rows());
  std::vector<Vector> per_sample(rows);
  std::vector<char> degenerate(rows, 0);
  detail::parallel_for(rows, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    const int target = cfg.target_class ? *cfg.target_class : (*labels)[i];
    const Vector u_row = u.row(row).transpose();
    const Vector fa = outputs(design_a, u_row, target);
    const double var = variance(fa);
    if (negligible_variance(var, fa)) {
      degenerate[i] = 1;
      return;
    }
    Vector indices(r);
    Matrix design_c = design_a;
    for (int k = 0; k < r; ++k) {
      design_c.col(k) = design_b.col(k);
      const Vector fc = outputs(design_c, u_row, target);
      design_c.col(k) = design_a.col(k);
      indices(k) = (fa - fc).squaredNorm() / (2.0 * static_cast<double>(n_designs)) / var;
    }
    per_sample[i] = std::move(indices);
  });

  Vector sum = Vector::Zero(r);
  Eigen::Index used = 0;
  Eigen::Index skipped = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (degenerate[i]) {
      ++skipped;
      continue;
    }
    sum += per_sample[i];
    ++used;
  }
  if (used > 0) sum /= static_cast<double>(used);
  return make_importance(std::move(sum), skipped);
}

std::vector<int> rank_concepts(const ImportanceVector& importance) {
  const Vector& v = importance.total_indices;
  std::vector<int> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return v(a) > v(b); });
  return order;
}

}  // namespace face
