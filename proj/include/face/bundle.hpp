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

#ifndef FACE_BUNDLE_HPP_
#define FACE_BUNDLE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "face/core.hpp"
#include "face/npy.hpp"

namespace face {

// Activations, labels and classifier head for one factorization run.
struct DatasetBundle {
  ActivationMatrix activations;
  LabelVector labels;
  LinearHead head;
  std::vector<std::string> class_names;
  std::string provenance;

  // Throws unless n, p and c agree across members.
  void validate() const;
};

// File names inside a bundle directory.
inline constexpr char kManifestFile[] = "manifest.json";
inline constexpr char kActivationsFile[] = "A.npy";
inline constexpr char kLabelsFile[] = "labels.npy";
inline constexpr char kHeadWeightsFile[] = "head_w.npy";
inline constexpr char kHeadBiasFile[] = "head_b.npy";

std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_file(const std::filesystem::path& path);

// Writes the four arrays and a manifest with shapes, dtypes and SHA-256
// checksums.
void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir,
                 NpyDtype activation_dtype = NpyDtype::kFloat64);

// Reads a bundle directory, verifying every checksum listed in the manifest.
DatasetBundle load_bundle(const std::filesystem::path& dir);

}  // namespace face

#endif  // FACE_BUNDLE_HPP_
