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

#include "hzs/core/error.h"

namespace hzs {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat:
      return "format error";
    case ErrorKind::kTruncation:
      return "truncation error";
    case ErrorKind::kData:
      return "data error";
    case ErrorKind::kValidation:
      return "validation error";
    case ErrorKind::kParameter:
      return "parameter error";
    case ErrorKind::kShape:
      return "shape error";
    case ErrorKind::kReference:
      return "reference error";
    case ErrorKind::kStructure:
      return "structure error";
    case ErrorKind::kConsistency:
      return "consistency error";
    case ErrorKind::kUndefinedMetric:
      return "undefined metric";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
    case ErrorKind::kParameter:
    case ErrorKind::kShape:
    case ErrorKind::kReference:
    case ErrorKind::kStructure:
      return 2;
    case ErrorKind::kFormat:
    case ErrorKind::kTruncation:
    case ErrorKind::kData:
    case ErrorKind::kUndefinedMetric:
      return 3;
    case ErrorKind::kConsistency:
      return 4;
  }
  return 1;
}

}  // namespace hzs
