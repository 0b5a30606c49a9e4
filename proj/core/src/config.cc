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

#include "tda/config.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tda/error.h"

namespace tda {
namespace {

using nlohmann::json;

double GetNumber(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  return j.get<double>();
}

std::size_t GetCount(const json& j, const std::string& key) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ConfigError(key, "expected an integer");
  }
  const auto v = j.get<long long>();
  if (v < 1) throw ConfigError(key, "must be >= 1");
  return static_cast<std::size_t>(v);
}

}  // namespace

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = {
      "pos_capacity", "neg_capacity", "p_l",      "tau_l",     "tau_h",       "pos_alpha",
      "pos_beta",     "neg_alpha",    "neg_beta", "logit_scale", "update_order"};
  return keys;
}

std::string_view UpdateOrderName(UpdateOrder order) {
  return order == UpdateOrder::kUpdateThenPredict ? "update_then_predict"
                                                  : "predict_then_update";
}

UpdateOrder ParseUpdateOrder(std::string_view name) {
  if (name == "update_then_predict") return UpdateOrder::kUpdateThenPredict;
  if (name == "predict_then_update") return UpdateOrder::kPredictThenUpdate;
  throw ConfigError("update_order", "expected update_then_predict or predict_then_update, got '" +
                                        std::string(name) + "'");
}

TdaConfig ParseConfig(std::string_view text) {
  TdaConfig config;
  if (std::all_of(text.begin(), text.end(),
                  [](unsigned char c) { return std::isspace(c) != 0; })) {
    return config;
  }
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<file>", "top level must be an object");

  const auto& keys = ConfigKeys();
  for (const auto& [key, value] : root.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(key, "unknown key");
    }
    if (key == "pos_capacity") config.pos_capacity = GetCount(value, key);
    else if (key == "neg_capacity") config.neg_capacity = GetCount(value, key);
    else if (key == "p_l") config.p_l = GetNumber(value, key);
    else if (key == "tau_l") config.tau_l = GetNumber(value, key);
    else if (key == "tau_h") config.tau_h = GetNumber(value, key);
    else if (key == "pos_alpha") config.pos_params.alpha = GetNumber(value, key);
    else if (key == "pos_beta") config.pos_params.beta = GetNumber(value, key);
    else if (key == "neg_alpha") config.neg_params.alpha = GetNumber(value, key);
    else if (key == "neg_beta") config.neg_params.beta = GetNumber(value, key);
    else if (key == "logit_scale") config.logit_scale = GetNumber(value, key);
    else if (key == "update_order") {
      if (!value.is_string()) throw ConfigError(key, "expected a string");
      config.update_order = ParseUpdateOrder(value.get<std::string>());
    }
  }
  return config;
}

TdaConfig ReadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

void ApplyOverrides(TdaConfig& config, const ConfigOverrides& o) {
  if (o.pos_capacity) config.pos_capacity = *o.pos_capacity;
  if (o.neg_capacity) config.neg_capacity = *o.neg_capacity;
  if (o.p_l) config.p_l = *o.p_l;
  if (o.tau_l) config.tau_l = *o.tau_l;
  if (o.tau_h) config.tau_h = *o.tau_h;
  if (o.pos_alpha) config.pos_params.alpha = *o.pos_alpha;
  if (o.pos_beta) config.pos_params.beta = *o.pos_beta;
  if (o.neg_alpha) config.neg_params.alpha = *o.neg_alpha;
  if (o.neg_beta) config.neg_params.beta = *o.neg_beta;
  if (o.logit_scale) config.logit_scale = *o.logit_scale;
  if (o.update_order) config.update_order = ParseUpdateOrder(*o.update_order);
}

TdaConfig LoadConfig(const std::optional<std::filesystem::path>& path,
                     const ConfigOverrides& overrides) {
  TdaConfig config = path ? ReadConfigFile(*path) : TdaConfig{};
  ApplyOverrides(config, overrides);
  config.Validate();
  return config;
}

std::string FormatConfig(const TdaConfig& c) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["pos_capacity"] = c.pos_capacity;
  j["neg_capacity"] = c.neg_capacity;
  j["p_l"] = c.p_l;
  j["tau_l"] = c.tau_l;
  j["tau_h"] = c.tau_h;
  j["pos_alpha"] = c.pos_params.alpha;
  j["pos_beta"] = c.pos_params.beta;
  j["neg_alpha"] = c.neg_params.alpha;
  j["neg_beta"] = c.neg_params.beta;
  j["logit_scale"] = c.logit_scale;
  j["update_order"] = std::string(UpdateOrderName(c.update_order));
  return j.dump(2) + "\n";
}

}  // namespace tda
