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

#include "face/synthetic.hpp"

#include <cmath>
#include <string>

#include "face/error.hpp"
#include "random.hpp"

namespace face {

SyntheticDataset generate_synthetic_dataset(const SyntheticSpec& spec) {
  const Eigen::Index c = spec.num_classes;
  const Eigen::Index nuisance =
      spec.adversarial_variance ? (spec.nuisance_rank > 0 ? spec.nuisance_rank : c) : 0;
  const Eigen::Index components = spec.r_true + nuisance;
  if (c < 2) throw_config("synthetic data needs at least two classes");
  if (spec.r_true < c) throw_config("r_true must be >= number of classes");
  if (components > spec.n) throw_config("n too small for the planted components");
  if (spec.p < 2 * components) {
    throw_config("p = " + std::to_string(spec.p) + " too small for " + std::to_string(components) +
                 " planted components (need 2 features each)");
  }
  if (!(spec.noise_sigma >= 0.0)) throw_config("noise_sigma must be >= 0");
  if (!(spec.dictionary_floor >= 0.0)) throw_config("dictionary_floor must be >= 0");

  detail::Rng rng(spec.seed);
  const Eigen::Index block = spec.p / components;

  // Dictionary: each component owns a feature block plus a faint dense floor.
  Matrix w(spec.p, components);
  for (Eigen::Index f = 0; f < spec.p; ++f) {
    for (Eigen::Index k = 0; k < components; ++k) {
      const bool owned = f / block == k;
      w(f, k) = owned ? 0.5 + rng.uniform() : spec.dictionary_floor * rng.uniform();
    }
  }

  // Coefficients: one dominant predictive concept per sample.
  Matrix u(spec.n, components);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    const auto label = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(c)));
    for (Eigen::Index k = 0; k < components; ++k) {
      if (k < c) {
        u(i, k) = spec.predictive_scale * (k == label ? 1.0 + 0.5 * rng.uniform() : 0.4 * rng.uniform());
      } else if (k < spec.r_true) {
        u(i, k) = 2.0 * rng.uniform();
      } else {
        u(i, k) = spec.nuisance_scale * -std::log(rng.uniform());
      }
    }
  }

  // Head: class j averages the block of concept j, centred across classes so
  // that the shared dense floor cancels.
  Matrix head_w = Matrix::Zero(c, spec.p);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index f = j * block; f < (j + 1) * block; ++f) {
      head_w(j, f) = spec.head_gain / (spec.predictive_scale * static_cast<double>(block));
    }
  }
  for (Eigen::Index f = 0; f < c * block; ++f) {
    const double mean = head_w.col(f).mean();
    head_w.col(f).array() -= mean;
  }
  Vector head_b = Vector::Zero(c);

  Matrix a = u * w.transpose();
  if (spec.noise_sigma > 0.0) {
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] += std::abs(spec.noise_sigma * rng.normal());
  }

  LinearHead head(std::move(head_w), std::move(head_b));
  const std::vector<int> predicted = argmax_rows(head.logits(a));

  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < c; ++j) names.push_back("class_" + std::to_string(j));

  const std::string provenance =
      "synthetic n=" + std::to_string(spec.n) + " p=" + std::to_string(spec.p) +
      " r_true=" + std::to_string(spec.r_true) + " c=" + std::to_string(c) +
      " noise_sigma=" + std::to_string(spec.noise_sigma) +
      " adversarial=" + (spec.adversarial_variance ? "1" : "0") +
      " seed=" + std::to_string(spec.seed);

  SyntheticDataset out{
      DatasetBundle{ActivationMatrix(std::move(a)), LabelVector(predicted.begin(), predicted.end()),
                    std::move(head), std::move(names), provenance},
      FactorPair{std::move(u), std::move(w)}, {}, nuisance};
  for (Eigen::Index j = 0; j < c; ++j) out.predictive_concepts.push_back(static_cast<int>(j));
  return out;
}

DatasetBundle generate_synthetic(const SyntheticSpec& spec) {
  return generate_synthetic_dataset(spec).bundle;
}

}  // namespace face
