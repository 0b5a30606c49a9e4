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

// Streaming evaluation: one method over one ordered stream, method
// comparisons, hyperparameter grids and cache dumps.
//
// Timing covers the per-sample loop only (base logits, entropy, cache updates,
// fused prediction). Dataset loading, support-set construction and any
// image-encoder forward pass are outside the measured window.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tda/adapter.h"
#include "tda/dataset.h"

namespace tda {

enum class Method { kZeroShot, kTipAdapter, kTdaPositiveOnly, kTdaNegativeOnly, kTdaFull };

// "zero-shot", "tip-adapter", "tda-positive", "tda-negative", "tda".
std::string_view MethodName(Method method);
Method ParseMethod(std::string_view name);
std::span<const Method> AllMethods();

struct CacheStats {
  std::size_t entries = 0;
  std::size_t capacity = 0;  // N * shot capacity
  double fill_ratio = 0.0;
  double mean_entropy = 0.0;
  // Fraction of entries whose routed class matches the source sample's label,
  // over entries with a known label.
  std::optional<double> purity;
};

struct RunReport {
  Method method = Method::kZeroShot;
  double top1_accuracy = 0.0;  // percent, over labeled samples
  std::vector<std::optional<double>> per_class_accuracy;  // percent; empty classes unset
  std::size_t samples_processed = 0;
  std::size_t labeled_samples = 0;
  std::size_t correct = 0;
  double wall_time_s = 0.0;
  double throughput = 0.0;  // samples per second
  std::optional<CacheStats> positive_cache;
  std::optional<CacheStats> negative_cache;
};

// Raw cache contents at the end of a run.
struct DumpedEntry {
  std::size_t class_id = 0;
  double entropy = 0.0;
  std::uint64_t arrival = 0;
  std::int32_t label = kUnlabeled;  // ground truth of the source sample
};

struct CacheDumpSection {
  std::string name;  // "positive" / "negative"
  std::size_t shot_capacity = 0;
  std::vector<DumpedEntry> entries;
};

struct CacheDump {
  std::string method;
  std::size_t num_classes = 0;
  std::vector<CacheDumpSection> caches;
};

struct RunOptions {
  // Labeled support set for kTipAdapter. When null, the first pos_capacity
  // labeled stream samples of each class are used.
  const EmbeddingDataset* support = nullptr;
  // Permutes the stream before running.
  std::optional<std::uint64_t> shuffle_seed;
  // Receives the final cache contents when set.
  CacheDump* dump = nullptr;
};

// Samples are processed one at a time in stream order, starting from empty
// caches. Accuracy counts every labeled sample, including the early phase.
RunReport RunStream(const EmbeddingDataset& ds, const TdaConfig& config, Method method,
                    const RunOptions& options = {});

// All five methods on the same stream.
std::vector<RunReport> Compare(const EmbeddingDataset& ds, const TdaConfig& config,
                               const RunOptions& options = {});

struct SeedSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
  std::size_t runs = 0;
};

SeedSummary SummarizeAccuracy(std::span<const RunReport> reports);

struct GridSpec {
  std::vector<std::size_t> pos_capacity;
  std::vector<std::size_t> neg_capacity;
  std::vector<double> p_l;
  std::vector<double> tau_l;
  std::vector<double> tau_h;
  std::vector<double> alpha;  // applied to both caches
  std::vector<double> beta;   // applied to both caches
  Method method = Method::kTdaFull;
  std::size_t max_combinations = 4096;

  // Every list holds the corresponding value of `base`.
  static GridSpec Singleton(const TdaConfig& base, Method method);
  std::size_t combinations() const;
};

struct GridRow {
  std::size_t index = 0;  // position in the cross product
  TdaConfig config;
  RunReport report;
};

struct GridResult {
  std::vector<GridRow> rows;  // accuracy desc, then wall time asc, then index
  std::size_t skipped = 0;    // combinations violating tau_l < tau_h
  TdaConfig best;
};

// Throws GridTooLarge with the computed size, InvalidConfig for an empty
// list. `base` supplies logit_scale and update_order. `threads` == 0 uses the
// hardware concurrency.
GridResult GridSearch(const EmbeddingDataset& ds, const GridSpec& spec, const TdaConfig& base,
                      std::size_t threads = 0, const RunOptions& options = {});

std::string FormatReportsText(std::span<const RunReport> reports);
std::string FormatReportsCsv(std::span<const RunReport> reports);
std::string FormatPerClassCsv(const RunReport& report);
std::string FormatGridCsv(const GridResult& result);

// Cache dump files (JSON).
void WriteCacheDump(const CacheDump& dump, const std::string& path);
CacheDump ReadCacheDump(const std::string& path);

struct ClassCacheStats {
  std::size_t class_id = 0;
  std::size_t count = 0;
  std::optional<double> purity;
};

struct CacheInspection {
  std::string name;
  std::size_t shot_capacity = 0;
  std::size_t entries = 0;
  double fill_ratio = 0.0;
  // min, q25, median, q75, max of stored entropies (linear interpolation).
  std::optional<std::array<double, 5>> entropy_quantiles;
  std::optional<double> purity;
  std::vector<ClassCacheStats> per_class;
};

std::vector<CacheInspection> Inspect(const CacheDump& dump);
std::string FormatInspectionText(std::span<const CacheInspection> inspections);
std::string FormatInspectionCsv(std::span<const CacheInspection> inspections);

}  // namespace tda
