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

#ifndef FACE_IMPORTANCE_HPP_
#define FACE_IMPORTANCE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "face/core.hpp"

namespace face {

enum class DesignSequence { kSobol, kLatinHypercube };
enum class SobolOutput { kClassLogit, kClassProb };

inline constexpr int kMaxSobolDimensions = 128;

// First `count` points of the binary Sobol (LP-tau) sequence in `dims`
// dimensions, unscrambled, starting at the origin. A non-zero `shift_seed`
// applies a random digital shift (XOR) per dimension.
Matrix sobol_points(Eigen::Index count, int dims, std::uint64_t shift_seed = 0);

// One jittered point per stratum in every dimension.
Matrix latin_hypercube(Eigen::Index count, int dims, std::uint64_t seed);

struct SobolConfig {
  Eigen::Index num_designs = 32;
  DesignSequence sequence = DesignSequence::kSobol;
  std::uint64_t seed = 0;
  SobolOutput output = SobolOutput::kClassLogit;
  // Class whose output is explained; unset means each sample uses its label.
  std::optional<int> target_class;
};

void validate(const SobolConfig& cfg);

struct ImportanceVector {
  Vector total_indices;
  Vector normalized;
  // Samples skipped because the output did not vary over the designs.
  Eigen::Index degenerate_samples = 0;
};

// Output of the head on the reconstruction of one sample whose concept
// coefficients are scaled by `mask`.
double masked_output(const Vector& u_row, const Vector& mask, const Matrix& w,
                     const LinearHead& head, int target_class,
                     SobolOutput output = SobolOutput::kClassLogit);

using DesignFunction = std::function<double(std::span<const double>)>;

struct TotalIndexEstimate {
  Vector indices;  // raw Jansen estimates, clamped at zero
  double variance = 0.0;
  bool degenerate = false;
};

// Jansen total indices of an arbitrary function on [0, 1]^dims.
TotalIndexEstimate jansen_total_indices(const DesignFunction& f, int dims, const SobolConfig& cfg);

// Concept importance averaged over the rows of U. `labels` is required when
// cfg.target_class is unset.
ImportanceVector jansen_total_indices(const Matrix& u, const Matrix& w, const LinearHead& head,
                                      const SobolConfig& cfg, const LabelVector* labels = nullptr);

// Clamps and normalizes raw indices into an ImportanceVector.
ImportanceVector make_importance(Vector total_indices, Eigen::Index degenerate_samples = 0);

// Concepts by descending importance; ties keep ascending index order.
std::vector<int> rank_concepts(const ImportanceVector& importance);

}  // namespace face

#endif  // FACE_IMPORTANCE_HPP_
