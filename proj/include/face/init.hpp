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

#ifndef FACE_INIT_HPP_
#define FACE_INIT_HPP_

#include <cstdint>

#include "face/core.hpp"

namespace face {

enum class InitMethod { kNndsvd, kRandom };

struct InitConfig {
  InitMethod method = InitMethod::kNndsvd;
  std::uint64_t seed = 0;
  double svd_tolerance = 1e-10;
  int svd_max_iterations = 1000;
};

// Leading singular triplets, singular values descending.
struct SvdResult {
  Vector singular_values;
  Matrix left;   // n x r, orthonormal columns
  Matrix right;  // p x r, orthonormal columns
};

// Rank-r truncated SVD via a Householder QR followed by one-sided Jacobi
// rotations on the triangular factor. Sweeps stop once every pair of columns
// has cosine below `tolerance`; exceeding `max_sweeps` throws a convergence
// error carrying the residual cosine.
SvdResult truncated_svd(const Matrix& a, Eigen::Index rank, double tolerance = 1e-10,
                        int max_sweeps = 1000);

// Value used to densify all-zero columns so that multiplicative updates can
// still move them.
inline constexpr double kNndsvdZeroFill = 1e-6;

FactorPair nndsvd_init(const ActivationMatrix& a, Eigen::Index rank, const InitConfig& cfg = {});

// Entries uniform on (0, 1) times sqrt(mean_value / rank).
FactorPair random_init(Eigen::Index n, Eigen::Index p, Eigen::Index rank, std::uint64_t seed,
                       double mean_value = 1.0);

// Dispatches on cfg.method; the random initializer is scaled by mean(A).
FactorPair initialize(const ActivationMatrix& a, Eigen::Index rank, const InitConfig& cfg);

}  // namespace face

#endif  // FACE_INIT_HPP_
