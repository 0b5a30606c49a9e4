// Copyright 2026 The tda-stream Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tda/error.h"

namespace tda {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidFeature: return "InvalidFeature";
    case ErrorKind::kInvalidDimension: return "InvalidDimension";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kInvalidClass: return "InvalidClass";
    case ErrorKind::kInvalidEntry: return "InvalidEntry";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::kCorruptDataset: return "CorruptDataset";
    case ErrorKind::kIoError: return "IoError";
    case ErrorKind::kGridTooLarge: return "GridTooLarge";
    case ErrorKind::kNoDumpAvailable: return "NoDumpAvailable";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

ConfigError::ConfigError(std::string field, const std::string& detail)
    : Error(ErrorKind::kInvalidConfig, field + ": " + detail),
      field_(std::move(field)) {}

}  // namespace tda
