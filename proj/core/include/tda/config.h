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

// TdaConfig persistence. The file format is a flat JSON object whose keys
// match the CLI flags with '-' replaced by '_':
//
//   {"pos_capacity": 3, "neg_capacity": 2, "p_l": 0.03, "tau_l": 0.2,
//    "tau_h": 0.5, "pos_alpha": 2.0, "pos_beta": 5.0, "neg_alpha": 2.0,
//    "neg_beta": 5.0, "logit_scale": 100.0, "update_order": "update_then_predict"}
//
// Missing keys keep their defaults; unknown keys are rejected.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tda/adapter.h"

namespace tda {

// Every configurable key, in file order.
const std::vector<std::string>& ConfigKeys();

// Values given explicitly on the command line or through the environment.
struct ConfigOverrides {
  std::optional<std::size_t> pos_capacity;
  std::optional<std::size_t> neg_capacity;
  std::optional<double> p_l;
  std::optional<double> tau_l;
  std::optional<double> tau_h;
  std::optional<double> pos_alpha;
  std::optional<double> pos_beta;
  std::optional<double> neg_alpha;
  std::optional<double> neg_beta;
  std::optional<double> logit_scale;
  std::optional<std::string> update_order;
};

std::string_view UpdateOrderName(UpdateOrder order);
// Accepts "update_then_predict" / "predict_then_update".
UpdateOrder ParseUpdateOrder(std::string_view name);

// Parses JSON text over the defaults. Empty or whitespace-only text yields the
// defaults. Does not validate ranges.
TdaConfig ParseConfig(std::string_view text);

// ParseConfig on the file's contents.
TdaConfig ReadConfigFile(const std::filesystem::path& path);

void ApplyOverrides(TdaConfig& config, const ConfigOverrides& overrides);

// Defaults <- file (if any) <- overrides, then Validate(). Throws ConfigError
// naming the field.
TdaConfig LoadConfig(const std::optional<std::filesystem::path>& path,
                     const ConfigOverrides& overrides = {});

// Pretty-printed JSON in the file syntax above; ParseConfig round-trips it.
std::string FormatConfig(const TdaConfig& config);

}  // namespace tda
