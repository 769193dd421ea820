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

#ifndef FACE_SYNTHETIC_HPP_
#define FACE_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include "face/bundle.hpp"

namespace face {

// Parameters of the planted-concept generator.
//
// Concepts 0..c-1 are predictive: class j's logit reads the feature block of
// concept j. The remaining true concepts carry no class signal. With
// `adversarial_variance`, `nuisance_rank` extra components with large
// coefficient variance are added on feature blocks the head ignores, so that a
// reconstruction-only factorization with rank r_true spends its budget on
// them.
struct SyntheticSpec {
  Eigen::Index n = 200;
  Eigen::Index p = 40;
  Eigen::Index r_true = 6;
  Eigen::Index num_classes = 3;
  double noise_sigma = 0.0;
  bool adversarial_variance = false;
  std::uint64_t seed = 0;
  // 0 selects num_classes.
  Eigen::Index nuisance_rank = 0;
  double nuisance_scale = 3.0;
  // Predictive concepts are low-variance relative to the others.
  double predictive_scale = 0.3;
  double head_gain = 6.0;
  // Upper bound of the dense off-block dictionary entries.
  double dictionary_floor = 0.05;
};

struct SyntheticDataset {
  DatasetBundle bundle;
  FactorPair truth;  // planted factors, nuisance components included
  std::vector<int> predictive_concepts;
  Eigen::Index nuisance_components = 0;
};

SyntheticDataset generate_synthetic_dataset(const SyntheticSpec& spec);
DatasetBundle generate_synthetic(const SyntheticSpec& spec);

}  // namespace face

#endif  // FACE_SYNTHETIC_HPP_
