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

#include "face/npy.hpp"

#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "face/error.hpp"

namespace face {
namespace {

static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicSize = 6;

[[noreturn]] void format_error(FormatReason reason, const std::string& what) {
  throw Error(reason, what);
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\n\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\n\r");
  return std::string(s.substr(begin, end - begin + 1));
}

// Returns the raw text of the value stored under `key` in a Python dict
// literal, up to the next top-level comma or closing brace.
std::string dict_value(const std::string& header, const std::string& key) {
  for (const char quote : {'\'', '"'}) {
    const std::string needle = std::string(1, quote) + key + std::string(1, quote);
    auto pos = header.find(needle);
    if (pos == std::string::npos) continue;
    pos = header.find(':', pos + needle.size());
    if (pos == std::string::npos) break;
    ++pos;
    int depth = 0;
    std::size_t end = pos;
    for (; end < header.size(); ++end) {
      const char c = header[end];
      if (c == '(' || c == '[') ++depth;
      if (c == ')' || c == ']') --depth;
      if (depth == 0 && (c == ',' || c == '}')) break;
    }
    return trim(std::string_view(header).substr(pos, end - pos));
  }
  format_error(FormatReason::kBadHeader, "array header lacks key '" + key + "'");
}

NpyDtype parse_descr(const std::string& raw) {
  if (raw.size() < 2 || (raw.front() != '\'' && raw.front() != '"') || raw.back() != raw.front()) {
    format_error(FormatReason::kBadHeader, "malformed descr " + raw);
  }
  const std::string descr = raw.substr(1, raw.size() - 2);
  if (descr == "<f8") return NpyDtype::kFloat64;
  if (descr == "<f4") return NpyDtype::kFloat32;
  if (descr == "<i8") return NpyDtype::kInt64;
  if (descr == "<i4") return NpyDtype::kInt32;
  format_error(FormatReason::kUnsupportedDtype, "unsupported dtype " + descr);
}

std::vector<std::size_t> parse_shape(const std::string& raw) {
  if (raw.size() < 2 || raw.front() != '(' || raw.back() != ')') {
    format_error(FormatReason::kBadHeader, "malformed shape " + raw);
  }
  std::vector<std::size_t> shape;
  std::stringstream body(raw.substr(1, raw.size() - 2));
  std::string item;
  while (std::getline(body, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item.find_first_not_of("0123456789") != std::string::npos) {
      format_error(FormatReason::kBadHeader, "malformed shape " + raw);
    }
    shape.push_back(static_cast<std::size_t>(std::stoull(item)));
  }
  return shape;
}

std::string shape_literal(const std::vector<std::size_t>& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(shape[i]);
  }
  if (shape.size() == 1) out += ",";
  return out + ")";
}

template <typename T>
std::vector<T> payload_as(const NpyArray& array) {
  std::vector<T> out(array.element_count());
  std::memcpy(out.data(), array.payload.data(), out.size() * sizeof(T));
  return out;
}

std::vector<double> as_doubles(const NpyArray& array) {
  switch (array.dtype) {
    case NpyDtype::kFloat64:
      return payload_as<double>(array);
    case NpyDtype::kFloat32: {
      const auto f = payload_as<float>(array);
      return std::vector<double>(f.begin(), f.end());
    }
    default:
      format_error(FormatReason::kUnsupportedDtype,
                   "expected a float array, found " + npy_descr(array.dtype));
  }
}

NpyArray from_doubles(std::vector<std::size_t> shape, const double* data, std::size_t count,
                      NpyDtype dtype) {
  NpyArray out;
  out.shape = std::move(shape);
  out.dtype = dtype;
  if (dtype == NpyDtype::kFloat64) {
    out.payload.resize(count * sizeof(double));
    std::memcpy(out.payload.data(), data, out.payload.size());
  } else if (dtype == NpyDtype::kFloat32) {
    std::vector<float> narrow(data, data + count);
    out.payload.resize(count * sizeof(float));
    std::memcpy(out.payload.data(), narrow.data(), out.payload.size());
  } else {
    throw_config("float data cannot be stored as " + npy_descr(dtype));
  }
  return out;
}

}  // namespace

std::string npy_descr(NpyDtype dtype) {
  switch (dtype) {
    case NpyDtype::kFloat64: return "<f8";
    case NpyDtype::kFloat32: return "<f4";
    case NpyDtype::kInt64: return "<i8";
    case NpyDtype::kInt32: return "<i4";
  }
  return "?";
}

std::size_t npy_item_size(NpyDtype dtype) {
  return dtype == NpyDtype::kFloat64 || dtype == NpyDtype::kInt64 ? 8 : 4;
}

std::size_t NpyArray::element_count() const {
  std::size_t count = 1;
  for (const auto d : shape) count *= d;
  return count;
}

NpyArray parse_npy(std::span<const std::byte> bytes) {
  if (bytes.size() < kMagicSize || std::memcmp(bytes.data(), kMagic, kMagicSize) != 0) {
    format_error(FormatReason::kBadMagic, "not an NPY file (bad magic)");
  }
  if (bytes.size() < kMagicSize + 4) format_error(FormatReason::kTruncated, "truncated preamble");
  const auto major = static_cast<unsigned>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = static_cast<std::size_t>(bytes[8]) | (static_cast<std::size_t>(bytes[9]) << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) format_error(FormatReason::kTruncated, "truncated preamble");
    for (int i = 0; i < 4; ++i) header_len |= static_cast<std::size_t>(bytes[8 + i]) << (8 * i);
    offset = 12;
  } else {
    format_error(FormatReason::kUnsupportedVersion,
                 "unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < offset + header_len) format_error(FormatReason::kTruncated, "truncated header");
  const std::string header(reinterpret_cast<const char*>(bytes.data() + offset), header_len);
  if (header.find('{') == std::string::npos || header.find('}') == std::string::npos) {
    format_error(FormatReason::kBadHeader, "header is not a dict literal");
  }

  NpyArray out;
  out.dtype = parse_descr(dict_value(header, "descr"));
  const std::string fortran = dict_value(header, "fortran_order");
  if (fortran == "True") {
    format_error(FormatReason::kUnsupportedLayout, "Fortran-ordered arrays are not supported");
  } else if (fortran != "False") {
    format_error(FormatReason::kBadHeader, "malformed fortran_order " + fortran);
  }
  out.shape = parse_shape(dict_value(header, "shape"));

  const std::size_t data_offset = offset + header_len;
  const std::size_t expected = out.element_count() * npy_item_size(out.dtype);
  const std::size_t available = bytes.size() - data_offset;
  if (available < expected) {
    format_error(FormatReason::kTruncated, "payload has " + std::to_string(available) +
                                               " bytes, expected " + std::to_string(expected));
  }
  if (available > expected) {
    format_error(FormatReason::kBadHeader, "payload has " + std::to_string(available - expected) +
                                               " trailing bytes");
  }
  out.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data_offset), bytes.end());
  return out;
}

std::vector<std::byte> serialize_npy(const NpyArray& array) {
  if (array.payload.size() != array.element_count() * npy_item_size(array.dtype)) {
    throw_shape("payload size does not match shape");
  }
  std::string header = "{'descr': '" + npy_descr(array.dtype) +
                       "', 'fortran_order': False, 'shape': " + shape_literal(array.shape) + ", }";
  const std::size_t unpadded = kMagicSize + 4 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');
  if (header.size() > 0xFFFF) throw_shape("array header too long for format version 1.0");

  std::vector<std::byte> out;
  out.reserve(kMagicSize + 4 + header.size() + array.payload.size());
  for (std::size_t i = 0; i < kMagicSize; ++i) out.push_back(static_cast<std::byte>(kMagic[i]));
  out.push_back(std::byte{1});
  out.push_back(std::byte{0});
  out.push_back(static_cast<std::byte>(header.size() & 0xFF));
  out.push_back(static_cast<std::byte>(header.size() >> 8));
  for (const char c : header) out.push_back(static_cast<std::byte>(c));
  out.insert(out.end(), array.payload.begin(), array.payload.end());
  return out;
}

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw Error(ErrorCode::kIo, "failed reading " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  static std::atomic<unsigned long> counter{0};
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move " + tmp.string() + " into place");
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::as_bytes(std::span(text.data(), text.size())));
}

NpyArray read_npy(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return parse_npy(bytes);
  } catch (const Error& e) {
    throw Error(e.format_reason(), path.string() + ": " + e.what());
  }
}

void write_npy(const std::filesystem::path& path, const NpyArray& array) {
  write_file_atomic(path, serialize_npy(array));
}

Matrix load_matrix(const std::filesystem::path& path) {
  const NpyArray array = read_npy(path);
  if (array.shape.size() != 2) {
    throw Error(FormatReason::kInvalidData,
                path.string() + ": expected a 2-D array, found " + shape_literal(array.shape));
  }
  const auto values = as_doubles(array);
  return Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(array.shape[0]),
                                  static_cast<Eigen::Index>(array.shape[1]));
}

void save_matrix(const std::filesystem::path& path, const Matrix& m, NpyDtype dtype) {
  write_npy(path, from_doubles({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                               m.data(), static_cast<std::size_t>(m.size()), dtype));
}

Vector load_vector(const std::filesystem::path& path) {
  const NpyArray array = read_npy(path);
  if (array.shape.size() != 1) {
    throw Error(FormatReason::kInvalidData,
                path.string() + ": expected a 1-D array, found " + shape_literal(array.shape));
  }
  const auto values = as_doubles(array);
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void save_vector(const std::filesystem::path& path, const Vector& v, NpyDtype dtype) {
  write_npy(path, from_doubles({static_cast<std::size_t>(v.size())}, v.data(),
                               static_cast<std::size_t>(v.size()), dtype));
}

std::vector<std::int64_t> load_int_vector(const std::filesystem::path& path) {
  const NpyArray array = read_npy(path);
  if (array.shape.size() != 1) {
    throw Error(FormatReason::kInvalidData,
                path.string() + ": expected a 1-D array, found " + shape_literal(array.shape));
  }
  if (array.dtype == NpyDtype::kInt64) return payload_as<std::int64_t>(array);
  if (array.dtype == NpyDtype::kInt32) {
    const auto narrow = payload_as<std::int32_t>(array);
    return std::vector<std::int64_t>(narrow.begin(), narrow.end());
  }
  throw Error(FormatReason::kUnsupportedDtype,
              path.string() + ": expected an integer array, found " + npy_descr(array.dtype));
}

void save_int_vector(const std::filesystem::path& path, std::span<const std::int64_t> v) {
  NpyArray array;
  array.shape = {v.size()};
  array.dtype = NpyDtype::kInt64;
  array.payload.resize(v.size_bytes());
  std::memcpy(array.payload.data(), v.data(), v.size_bytes());
  write_npy(path, array);
}

}  // namespace face
