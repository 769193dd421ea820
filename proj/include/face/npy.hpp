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

#ifndef FACE_NPY_HPP_
#define FACE_NPY_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "face/core.hpp"

namespace face {

// Little-endian element types understood by the array reader and writer.
enum class NpyDtype { kFloat64, kFloat32, kInt64, kInt32 };

std::string npy_descr(NpyDtype dtype);
std::size_t npy_item_size(NpyDtype dtype);

// Decoded array file: C-order payload bytes plus shape.
struct NpyArray {
  std::vector<std::size_t> shape;
  NpyDtype dtype = NpyDtype::kFloat64;
  std::vector<std::byte> payload;

  std::size_t element_count() const;
};

NpyArray parse_npy(std::span<const std::byte> bytes);
std::vector<std::byte> serialize_npy(const NpyArray& array);

NpyArray read_npy(const std::filesystem::path& path);
void write_npy(const std::filesystem::path& path, const NpyArray& array);

// 2-D float arrays. float32 payloads are widened on load; saving as float32
// narrows.
Matrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Matrix& m,
                 NpyDtype dtype = NpyDtype::kFloat64);

// 1-D float arrays.
Vector load_vector(const std::filesystem::path& path);
void save_vector(const std::filesystem::path& path, const Vector& v,
                 NpyDtype dtype = NpyDtype::kFloat64);

// 1-D integer arrays (int64 or int32 on disk).
std::vector<std::int64_t> load_int_vector(const std::filesystem::path& path);
void save_int_vector(const std::filesystem::path& path, std::span<const std::int64_t> v);

std::vector<std::byte> read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace face

#endif  // FACE_NPY_HPP_
