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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tda/adapter.h"
#include "tda/dynamic_cache.h"
#include "tda/numeric.h"

namespace tda {

// Which caches take part in updates and prediction.
struct CacheArms {
  bool positive = true;
  bool negative = true;
};

struct StepResult {
  LogitVector logits;
  std::size_t prediction = 0;
  // Normalized entropy of the frozen (base) prediction.
  double entropy = 0.0;
  UpdateOutcome positive_update;
  UpdateOutcome negative_update;
};

// Single-writer streaming state: a frozen head plus the two dynamic caches.
// Samples must be fed in stream order; results depend on it.
class StreamingAdapter {
 public:
  StreamingAdapter(ClassifierHead head, TdaConfig config, CacheArms arms = {});

  // One stream step: base prediction, entropy, cache updates and the fused
  // prediction, ordered by config().update_order. Arrival indices count up
  // from 0 across calls.
  StepResult Step(const FeatureVector& f);

  // Equivalent to calling Step() on each element in order, with bit-identical
  // results. Base logits and affinities to cache rows that stay untouched
  // during the block are computed block-wise, so the head and the cache keys
  // are streamed from memory once per block instead of once per sample.
  void StepBlock(std::span<const FeatureVector* const> block, std::span<StepResult> results);

  // Fused prediction from the current caches; no state change.
  LogitVector Predict(const FeatureVector& f) const;

  // When disabled, Step() only predicts. Used for frozen-cache evaluation.
  void set_updates_enabled(bool enabled) { updates_enabled_ = enabled; }
  bool updates_enabled() const noexcept { return updates_enabled_; }

  const ClassifierHead& head() const noexcept { return head_; }
  const TdaConfig& config() const noexcept { return config_; }
  const CacheArms& arms() const noexcept { return arms_; }
  const DynamicCache& positive() const noexcept { return positive_; }
  const DynamicCache& negative() const noexcept { return negative_; }
  // Mutable access for preloading labeled entries.
  DynamicCache& mutable_positive() noexcept { return positive_; }
  DynamicCache& mutable_negative() noexcept { return negative_; }
  std::uint64_t samples_seen() const noexcept { return next_arrival_; }

  void Reset();

 private:
  // Affinities of a block of queries to the rows a cache held when the block
  // started, plus which of those rows were rewritten since.
  struct AffinitySnapshot {
    std::size_t rows = 0;
    std::vector<double> z;  // block-major: z[b * rows + r]
    std::vector<char> touched;
  };

  void Update(const FeatureVector& f, const ProbabilityVector& p, double entropy,
              StepResult& result, AffinitySnapshot* pos_snap, AffinitySnapshot* neg_snap);
  LogitVector Fuse(const FeatureVector& f, LogitVector base) const;
  static void TakeSnapshot(const DynamicCache& cache,
                           std::span<const FeatureVector* const> block, AffinitySnapshot& snap);
  static void AddCacheTerm(const DynamicCache& cache, const AffinitySnapshot& snap,
                           std::size_t b, const FeatureVector& f, const AdapterParams& params,
                           CacheSign sign, LogitVector& logits);

  ClassifierHead head_;
  TdaConfig config_;
  CacheArms arms_;
  DynamicCache positive_;
  DynamicCache negative_;
  bool updates_enabled_ = true;
  std::uint64_t next_arrival_ = 0;
};

}  // namespace tda
