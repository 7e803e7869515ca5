/*
 * Copyright 2026 The hzs Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HZS_CORE_ERROR_H_
#define HZS_CORE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hzs {

// Every failure raised by the toolkit carries one of these kinds. The CLI
// maps them onto process exit codes.
enum class ErrorKind {
  kFormat,          // malformed container, manifest or hierarchy file
  kTruncation,      // payload length disagrees with the header
  kData,            // NaN/Inf, zero-norm rows, missing embeddings or norms
  kValidation,      // cross-object invariant violations
  kParameter,       // caller supplied an out-of-range argument
  kShape,           // dimension or length mismatch
  kReference,       // unknown identifier
  kStructure,       // cycles in the hierarchy
  kConsistency,     // two-phase hash mismatch, missing phase-1 output
  kUndefinedMetric  // metric has no defined value for this input
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

// 2 validation error, 3 data error, 4 consistency error.
int exit_code(ErrorKind kind);

}  // namespace hzs

#endif  // HZS_CORE_ERROR_H_
