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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tda {

enum class ErrorKind {
  kInvalidFeature,
  kInvalidDimension,
  kDimensionMismatch,
  kInvalidClass,
  kInvalidEntry,
  kInvalidConfig,
  kUnsupportedFormat,
  kCorruptDataset,
  kIoError,
  kGridTooLarge,
  kNoDumpAvailable,
};

// Stable class name used in CLI diagnostics, e.g. "InvalidConfig".
std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception type. `what()`
// carries "<KindName>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

// Configuration errors also name the offending field ("tau", "pos_capacity").
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& detail);

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace tda
