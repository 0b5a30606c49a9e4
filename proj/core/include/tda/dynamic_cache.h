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

// Per-class bounded key-value caches ordered by prediction entropy.
//
// Each class owns a queue of at most `shot_capacity` entries. A new entry is
// appended while the queue has room; once full it replaces the queue's
// highest-entropy entry only if its own entropy is strictly lower. The same
// container backs the positive cache (one-hot values) and the negative cache
// ({-1, 0} masks).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tda/numeric.h"

namespace tda {

enum class CacheKind { kPositive, kNegative };

struct CacheEntry {
  FeatureVector key;
  // Length N. One-hot for the positive cache, {-1, 0} mask for the negative.
  std::vector<double> value;
  // Normalized entropy of the frozen prediction when the entry was offered.
  double entropy = 0.0;
  // Position of the source sample in the stream.
  std::uint64_t arrival = 0;
};

enum class UpdateStatus { kInserted, kReplaced, kRejected };

enum class RejectReason {
  kNone,
  kNotLowerEntropy,     // queue full, entropy >= current maximum
  kOutsideEntropyGate,  // negative cache only
  kVacuousMask,         // negative cache only: no class above p_l
};

struct UpdateOutcome {
  UpdateStatus status = UpdateStatus::kRejected;
  RejectReason reason = RejectReason::kNone;
  // Set for kReplaced.
  std::optional<CacheEntry> evicted;
  // Storage row written by an accepted update (see DynamicCache::keys()).
  std::size_t row = 0;

  bool accepted() const noexcept { return status != UpdateStatus::kRejected; }
};

// Dense snapshot of a cache. Row i of `keys` (M x D) and row i of `values`
// (M x N) come from the same entry. Rows are ordered by class id, then
// entropy, then arrival.
struct CacheMatrices {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  std::vector<float> keys;
  std::vector<double> values;

  std::span<const float> key(std::size_t r) const {
    return std::span<const float>(keys).subspan(r * dim, dim);
  }
  std::span<const double> value(std::size_t r) const {
    return std::span<const double>(values).subspan(r * num_classes, num_classes);
  }
};

// One non-zero coordinate of a stored label vector.
struct LabelEntry {
  std::uint32_t class_id;
  double value;
};

class DynamicCache {
 public:
  DynamicCache(CacheKind kind, std::size_t num_classes, std::size_t dim,
               std::size_t shot_capacity);

  CacheKind kind() const noexcept { return kind_; }
  std::size_t num_classes() const noexcept { return queues_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t shot_capacity() const noexcept { return shot_capacity_; }

  // Total entries across classes.
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  std::size_t class_size(std::size_t class_id) const;
  std::optional<double> max_entropy(std::size_t class_id) const;

  // The two-condition insert/replace rule. Throws InvalidClass for an
  // out-of-range class, DimensionMismatch for wrongly sized keys/values and
  // InvalidEntry when the value violates the cache kind's invariant.
  UpdateOutcome Update(std::size_t class_id, CacheEntry entry);

  // Entries of one class, ascending (entropy, arrival).
  std::vector<CacheEntry> Entries(std::size_t class_id) const;

  CacheMatrices AsMatrices() const;

  // Storage rows in insertion-slot order (not the AsMatrices order). Keys
  // are packed contiguously so retrieval is one pass over `keys()`.
  std::span<const float> keys() const noexcept { return keys_; }
  std::span<const LabelEntry> labels(std::size_t row) const { return rows_[row].labels; }

  void Clear();

 private:
  struct Row {
    std::uint32_t class_id;
    double entropy;
    std::uint64_t arrival;
    std::vector<LabelEntry> labels;
  };

  void ValidateEntry(const CacheEntry& entry) const;
  CacheEntry MaterializeRow(std::size_t row) const;
  void WriteRow(std::size_t row, std::uint32_t class_id, const CacheEntry& entry);
  // Keeps queues_[class_id] sorted after rows_[row] was (re)written.
  void PlaceInQueue(std::uint32_t class_id, std::size_t row);

  CacheKind kind_;
  std::size_t dim_;
  std::size_t shot_capacity_;
  std::vector<Row> rows_;
  std::vector<float> keys_;
  // Row indices per class, ascending (entropy, arrival); back() is the
  // eviction candidate.
  std::vector<std::vector<std::size_t>> queues_;
};

// A positive cache holding a labeled support set verbatim: one entry per
// labeled row of `support` (values must be one-hot), entropy 0, arrival = row
// index, shot capacity = largest per-class row count. Used for static-cache
// baselines.
DynamicCache LoadStaticCache(const CacheMatrices& support);

// Thresholds controlling which samples reach the negative cache.
struct NegativeSelection {
  double mask_threshold = 0.03;  // p_l
  double entropy_low = 0.2;      // tau_l
  double entropy_high = 0.5;     // tau_h

  // Throws ConfigError("tau") or ConfigError("p_l").
  void Validate() const;
};

// Stores a one-hot pseudo label at argmax(p) (ties to the lowest index).
UpdateOutcome UpdatePositive(DynamicCache& cache, const FeatureVector& f,
                             const ProbabilityVector& p, double entropy,
                             std::uint64_t arrival);

// True iff tau_l < entropy < tau_h.
bool PassesEntropyGate(double entropy, double tau_l, double tau_h);

// mask[c] = -1 where p[c] > p_l, else 0.
std::vector<double> NegativeMask(const ProbabilityVector& p, double p_l);

// Gate, mask, then the same insert/replace rule under class argmax(p).
// Rejections carry kOutsideEntropyGate or kVacuousMask when they happen
// before the queue is consulted.
UpdateOutcome UpdateNegative(DynamicCache& cache, const FeatureVector& f,
                             const ProbabilityVector& p, double entropy,
                             const NegativeSelection& selection, std::uint64_t arrival);

}  // namespace tda
