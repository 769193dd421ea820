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

#include "face/bundle.hpp"

#include <iomanip>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "face/error.hpp"

namespace face {
namespace {

using nlohmann::json;

json array_entry(const std::filesystem::path& dir, const std::string& name,
                 std::vector<std::size_t> shape, NpyDtype dtype) {
  return json{{"path", name},
              {"shape", shape},
              {"dtype", npy_descr(dtype)},
              {"sha256", sha256_file(dir / name)}};
}

std::filesystem::path checked_array(const std::filesystem::path& dir, const json& arrays,
                                    const std::string& key) {
  if (!arrays.contains(key)) {
    throw Error(FormatReason::kBadHeader, "manifest lacks array entry '" + key + "'");
  }
  const json& entry = arrays.at(key);
  const std::filesystem::path path = dir / entry.at("path").get<std::string>();
  if (entry.contains("sha256")) {
    const std::string expected = entry.at("sha256").get<std::string>();
    const std::string actual = sha256_file(path);
    if (expected != actual) {
      throw Error(FormatReason::kChecksumMismatch,
                  path.string() + ": checksum " + actual + " does not match manifest " + expected);
    }
  }
  return path;
}

void check_manifest_shape(const json& arrays, const std::string& key,
                          const std::vector<std::size_t>& actual) {
  const json& entry = arrays.at(key);
  if (entry.contains("shape") && entry.at("shape").get<std::vector<std::size_t>>() != actual) {
    throw Error(FormatReason::kInvalidData, "manifest shape for '" + key + "' disagrees with file");
  }
}

}  // namespace

void DatasetBundle::validate() const {
  if (head.num_features() != activations.cols()) {
    throw_shape("head expects " + std::to_string(head.num_features()) + " features, activations have " +
                std::to_string(activations.cols()));
  }
  check_labels(labels, activations.rows(), head.num_classes());
  if (!class_names.empty() && static_cast<Eigen::Index>(class_names.size()) != head.num_classes()) {
    throw_shape("class name count does not match the head");
  }
}

std::string sha256_hex(std::span<const std::byte> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 computation failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir,
                 NpyDtype activation_dtype) {
  bundle.validate();
  std::filesystem::create_directories(dir);
  const auto n = static_cast<std::size_t>(bundle.activations.rows());
  const auto p = static_cast<std::size_t>(bundle.activations.cols());
  const auto c = static_cast<std::size_t>(bundle.head.num_classes());

  save_matrix(dir / kActivationsFile, bundle.activations.data(), activation_dtype);
  const std::vector<std::int64_t> labels(bundle.labels.begin(), bundle.labels.end());
  save_int_vector(dir / kLabelsFile, labels);
  save_matrix(dir / kHeadWeightsFile, bundle.head.weights());
  save_vector(dir / kHeadBiasFile, bundle.head.bias());

  json manifest;
  manifest["format"] = "face-bundle";
  manifest["version"] = 1;
  manifest["n"] = n;
  manifest["p"] = p;
  manifest["c"] = c;
  manifest["arrays"] = {
      {"activations", array_entry(dir, kActivationsFile, {n, p}, activation_dtype)},
      {"labels", array_entry(dir, kLabelsFile, {n}, NpyDtype::kInt64)},
      {"head_weights", array_entry(dir, kHeadWeightsFile, {c, p}, NpyDtype::kFloat64)},
      {"head_bias", array_entry(dir, kHeadBiasFile, {c}, NpyDtype::kFloat64)},
  };
  manifest["class_names"] = bundle.class_names;
  manifest["provenance"] = bundle.provenance;
  write_file_atomic(dir / kManifestFile, manifest.dump(2) + "\n");
}

DatasetBundle load_bundle(const std::filesystem::path& dir) {
  json manifest;
  try {
    const auto bytes = read_file(dir / kManifestFile);
    manifest = json::parse(reinterpret_cast<const char*>(bytes.data()),
                           reinterpret_cast<const char*>(bytes.data()) + bytes.size());
  } catch (const json::exception& e) {
    throw Error(FormatReason::kBadHeader, (dir / kManifestFile).string() + ": " + e.what());
  }

  try {
    if (manifest.value("format", std::string()) != "face-bundle") {
      throw Error(FormatReason::kBadHeader, (dir / kManifestFile).string() + ": not a face-bundle manifest");
    }
    if (manifest.value("version", 0) != 1) {
      throw Error(FormatReason::kUnsupportedVersion,
                  (dir / kManifestFile).string() + ": unsupported manifest version");
    }
    const json& arrays = manifest.at("arrays");
    Matrix a = load_matrix(checked_array(dir, arrays, "activations"));
    const auto raw_labels = load_int_vector(checked_array(dir, arrays, "labels"));
    Matrix head_w = load_matrix(checked_array(dir, arrays, "head_weights"));
    Vector head_b = load_vector(checked_array(dir, arrays, "head_bias"));

    check_manifest_shape(arrays, "activations",
                         {static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols())});
    check_manifest_shape(arrays, "labels", {raw_labels.size()});
    check_manifest_shape(arrays, "head_weights",
                         {static_cast<std::size_t>(head_w.rows()),
                          static_cast<std::size_t>(head_w.cols())});
    check_manifest_shape(arrays, "head_bias", {static_cast<std::size_t>(head_b.size())});

    LabelVector labels;
    labels.reserve(raw_labels.size());
    for (const auto y : raw_labels) {
      if (y < 0 || y > std::numeric_limits<int>::max()) {
        throw Error(FormatReason::kInvalidData, "label value out of range");
      }
      labels.push_back(static_cast<int>(y));
    }

    std::vector<std::string> names;
    if (manifest.contains("class_names")) names = manifest.at("class_names").get<std::vector<std::string>>();
    std::string provenance;
    if (manifest.contains("provenance") && manifest.at("provenance").is_string()) {
      provenance = manifest.at("provenance").get<std::string>();
    }

    DatasetBundle bundle{ActivationMatrix(std::move(a)), std::move(labels),
                         LinearHead(std::move(head_w), std::move(head_b)), std::move(names),
                         std::move(provenance)};
    bundle.validate();
    return bundle;
  } catch (const json::exception& e) {
    throw Error(FormatReason::kBadHeader, (dir / kManifestFile).string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat || e.code() == ErrorCode::kIo) throw;
    // Structurally valid files with invalid contents (negative activations,
    // mismatched shapes) are still bad input data.
    throw Error(FormatReason::kInvalidData, dir.string() + ": " + e.what());
  }
}

}  // namespace face
