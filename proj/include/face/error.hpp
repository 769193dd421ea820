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

#ifndef FACE_ERROR_HPP_
#define FACE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace face {

// Error categories. The numeric values of the first three match the CLI exit
// codes (format = 2, diverged = 3, config = 4).
enum class ErrorCode {
  kFormat = 2,
  kDiverged = 3,
  kConfig = 4,
  kShape = 5,
  kDomain = 6,
  kConvergence = 7,
  kIo = 8,
};

// Finer-grained reason for format errors raised by the array reader.
enum class FormatReason {
  kNone = 0,
  kBadMagic,
  kUnsupportedVersion,
  kBadHeader,
  kUnsupportedDtype,
  kUnsupportedLayout,
  kTruncated,
  kChecksumMismatch,
  kInvalidData,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Error(FormatReason reason, const std::string& what)
      : std::runtime_error(what), code_(ErrorCode::kFormat), reason_(reason) {}

  ErrorCode code() const noexcept { return code_; }
  FormatReason format_reason() const noexcept { return reason_; }

 private:
  ErrorCode code_;
  FormatReason reason_ = FormatReason::kNone;
};

[[noreturn]] inline void throw_shape(const std::string& what) {
  throw Error(ErrorCode::kShape, what);
}
[[noreturn]] inline void throw_domain(const std::string& what) {
  throw Error(ErrorCode::kDomain, what);
}
[[noreturn]] inline void throw_config(const std::string& what) {
  throw Error(ErrorCode::kConfig, what);
}

}  // namespace face

#endif  // FACE_ERROR_HPP_
