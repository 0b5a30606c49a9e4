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

#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <string>

#include "tda/error.h"
#include "test_util.h"

namespace tda {
namespace {

using ::tda::testing::KindOf;

std::filesystem::path WriteTemp(const std::string& name, const std::string& text) {
  const std::filesystem::path path = std::filesystem::path(::testing::TempDir()) / name;
  std::ofstream(path) << text;
  return path;
}

std::string FieldOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

TEST(ConfigTest, EmptyConfigGivesDefaults) {
  for (const char* text : {"", "  \n", "{}"}) {
    const TdaConfig c = ParseConfig(text);
    EXPECT_EQ(c, TdaConfig{}) << '"' << text << '"';
    EXPECT_EQ(c.pos_capacity, 3u);
    EXPECT_EQ(c.neg_capacity, 2u);
    EXPECT_EQ(c.p_l, 0.03);
    EXPECT_EQ(c.tau_l, 0.2);
    EXPECT_EQ(c.tau_h, 0.5);
    EXPECT_EQ(c.pos_params.alpha, 2.0);
    EXPECT_EQ(c.pos_params.beta, 5.0);
    EXPECT_EQ(c.neg_params.alpha, 2.0);
    EXPECT_EQ(c.neg_params.beta, 5.0);
    EXPECT_EQ(c.logit_scale, 100.0);
  }
  EXPECT_EQ(LoadConfig(std::nullopt), TdaConfig{});
}

TEST(ConfigTest, FlagOverridesFile) {
  const auto path = WriteTemp("k6.json", R"({"pos_capacity": 6, "neg_capacity": 4})");
  ConfigOverrides flags;
  flags.pos_capacity = 3;
  const TdaConfig c = LoadConfig(path, flags);
  EXPECT_EQ(c.pos_capacity, 3u);
  EXPECT_EQ(c.neg_capacity, 4u);
  EXPECT_EQ(LoadConfig(path).pos_capacity, 6u);
}

TEST(ConfigTest, InvertedTauIsInvalidConfigNamedTau) {
  const auto path = WriteTemp("tau.json", R"({"tau_l": 0.5, "tau_h": 0.2})");
  EXPECT_EQ(KindOf([&] { LoadConfig(path); }), ErrorKind::kInvalidConfig);
  EXPECT_EQ(FieldOf([&] { LoadConfig(path); }), "tau");
  ConfigOverrides flags;
  flags.tau_l = 0.5;
  flags.tau_h = 0.2;
  EXPECT_EQ(FieldOf([&] { LoadConfig(std::nullopt, flags); }), "tau");
}

TEST(ConfigTest, UnknownKeyRejected) {
  EXPECT_EQ(FieldOf([] { ParseConfig(R"({"shots": 3})"); }), "shots");
}

TEST(ConfigTest, TypeErrorsNameField) {
  EXPECT_EQ(FieldOf([] { ParseConfig(R"({"pos_capacity": 2.5})"); }), "pos_capacity");
  EXPECT_EQ(FieldOf([] { ParseConfig(R"({"neg_capacity": 0})"); }), "neg_capacity");
  EXPECT_EQ(FieldOf([] { ParseConfig(R"({"p_l": "low"})"); }), "p_l");
  EXPECT_EQ(FieldOf([] { ParseConfig(R"({"update_order": "sideways"})"); }), "update_order");
  EXPECT_EQ(KindOf([] { ParseConfig("{not json"); }), ErrorKind::kInvalidConfig);
  EXPECT_EQ(KindOf([] { ParseConfig("[1, 2]"); }), ErrorKind::kInvalidConfig);
}

TEST(ConfigTest, RangeErrorsNameField) {
  ConfigOverrides flags;
  flags.p_l = 1.5;
  EXPECT_EQ(FieldOf([&] { LoadConfig(std::nullopt, flags); }), "p_l");
  flags = {};
  flags.neg_beta = 0.0;
  EXPECT_EQ(FieldOf([&] { LoadConfig(std::nullopt, flags); }), "neg_beta");
  flags = {};
  flags.logit_scale = -1.0;
  EXPECT_EQ(FieldOf([&] { LoadConfig(std::nullopt, flags); }), "logit_scale");
}

TEST(ConfigTest, EveryKeyParses) {
  const TdaConfig c = ParseConfig(R"({
    "pos_capacity": 5, "neg_capacity": 7, "p_l": 0.1, "tau_l": 0.3, "tau_h": 0.6,
    "pos_alpha": 1.5, "pos_beta": 4.5, "neg_alpha": 0.5, "neg_beta": 9.0,
    "logit_scale": 50.0, "update_order": "predict_then_update"})");
  EXPECT_EQ(c.pos_capacity, 5u);
  EXPECT_EQ(c.neg_capacity, 7u);
  EXPECT_EQ(c.p_l, 0.1);
  EXPECT_EQ(c.tau_l, 0.3);
  EXPECT_EQ(c.tau_h, 0.6);
  EXPECT_EQ(c.pos_params, (AdapterParams{1.5, 4.5}));
  EXPECT_EQ(c.neg_params, (AdapterParams{0.5, 9.0}));
  EXPECT_EQ(c.logit_scale, 50.0);
  EXPECT_EQ(c.update_order, UpdateOrder::kPredictThenUpdate);
  EXPECT_EQ(ConfigKeys().size(), 11u);
}

TEST(ConfigTest, FormatRoundTrips) {
  TdaConfig c;
  c.pos_capacity = 6;
  c.tau_l = 0.25;
  c.neg_params.alpha = 0.75;
  c.update_order = UpdateOrder::kPredictThenUpdate;
  EXPECT_EQ(ParseConfig(FormatConfig(c)), c);
  EXPECT_EQ(ParseConfig(FormatConfig(TdaConfig{})), TdaConfig{});
}

TEST(ConfigTest, MissingFileIsIoError) {
  EXPECT_EQ(KindOf([] { LoadConfig(std::filesystem::path("/nonexistent/tda.json")); }),
            ErrorKind::kIoError);
}

}  // namespace
}  // namespace tda
