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

#include "tda/dynamic_cache.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "tda/error.h"

namespace tda {

DynamicCache::DynamicCache(CacheKind kind, std::size_t num_classes, std::size_t dim,
                           std::size_t shot_capacity)
    : kind_(kind), dim_(dim), shot_capacity_(shot_capacity), queues_(num_classes) {
  if (num_classes == 0 || dim == 0) {
    throw Error(ErrorKind::kInvalidDimension, "cache needs N >= 1 and D >= 1");
  }
  if (shot_capacity == 0) {
    throw ConfigError(kind == CacheKind::kPositive ? "pos_capacity" : "neg_capacity",
                      "shot capacity must be >= 1");
  }
  rows_.reserve(num_classes * shot_capacity);
}

std::size_t DynamicCache::class_size(std::size_t class_id) const {
  if (class_id >= queues_.size()) {
    throw Error(ErrorKind::kInvalidClass, "class " + std::to_string(class_id));
  }
  return queues_[class_id].size();
}

std::optional<double> DynamicCache::max_entropy(std::size_t class_id) const {
  if (class_size(class_id) == 0) return std::nullopt;
  return rows_[queues_[class_id].back()].entropy;
}

void DynamicCache::ValidateEntry(const CacheEntry& entry) const {
  if (entry.key.dim() != dim_) {
    throw Error(ErrorKind::kDimensionMismatch,
                "key dim " + std::to_string(entry.key.dim()) + ", cache dim " +
                    std::to_string(dim_));
  }
  if (entry.value.size() != num_classes()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "value length " + std::to_string(entry.value.size()) + ", cache classes " +
                    std::to_string(num_classes()));
  }
  if (!(entry.entropy >= 0.0 && entry.entropy <= 1.0)) {
    throw Error(ErrorKind::kInvalidEntry, "entropy outside [0, 1]");
  }
  std::size_t ones = 0;
  std::size_t minus_ones = 0;
  for (double v : entry.value) {
    if (v == 1.0) {
      ++ones;
    } else if (v == -1.0) {
      ++minus_ones;
    } else if (v != 0.0) {
      throw Error(ErrorKind::kInvalidEntry, "label entries must be 0, 1 or -1");
    }
  }
  if (kind_ == CacheKind::kPositive && (ones != 1 || minus_ones != 0)) {
    throw Error(ErrorKind::kInvalidEntry, "positive value must be one-hot");
  }
  if (kind_ == CacheKind::kNegative && (ones != 0 || minus_ones == 0)) {
    throw Error(ErrorKind::kInvalidEntry, "negative value must be a non-empty {-1,0} mask");
  }
}

void DynamicCache::WriteRow(std::size_t row, std::uint32_t class_id, const CacheEntry& entry) {
  Row& r = rows_[row];
  r.class_id = class_id;
  r.entropy = entry.entropy;
  r.arrival = entry.arrival;
  r.labels.clear();
  for (std::size_t c = 0; c < entry.value.size(); ++c) {
    if (entry.value[c] != 0.0) {
      r.labels.push_back({static_cast<std::uint32_t>(c), entry.value[c]});
    }
  }
  std::copy(entry.key.values().begin(), entry.key.values().end(),
            keys_.begin() + static_cast<std::ptrdiff_t>(row * dim_));
}

void DynamicCache::PlaceInQueue(std::uint32_t class_id, std::size_t row) {
  auto& queue = queues_[class_id];
  const auto key_of = [this](std::size_t r) {
    return std::make_tuple(rows_[r].entropy, rows_[r].arrival);
  };
  const auto pos = std::upper_bound(
      queue.begin(), queue.end(), row,
      [&](std::size_t a, std::size_t b) { return key_of(a) < key_of(b); });
  queue.insert(pos, row);
}

UpdateOutcome DynamicCache::Update(std::size_t class_id, CacheEntry entry) {
  if (class_id >= queues_.size()) {
    throw Error(ErrorKind::kInvalidClass, "class " + std::to_string(class_id) +
                                              " outside [0, " +
                                              std::to_string(queues_.size()) + ")");
  }
  ValidateEntry(entry);
  const auto cls = static_cast<std::uint32_t>(class_id);
  auto& queue = queues_[class_id];

  UpdateOutcome outcome;
  if (queue.size() < shot_capacity_) {
    const std::size_t row = rows_.size();
    rows_.emplace_back();
    keys_.resize(keys_.size() + dim_);
    WriteRow(row, cls, entry);
    PlaceInQueue(cls, row);
    outcome.status = UpdateStatus::kInserted;
    outcome.row = row;
    return outcome;
  }

  const std::size_t worst = queue.back();
  if (entry.entropy < rows_[worst].entropy) {
    outcome.status = UpdateStatus::kReplaced;
    outcome.evicted = MaterializeRow(worst);
    queue.pop_back();
    WriteRow(worst, cls, entry);
    PlaceInQueue(cls, worst);
    outcome.row = worst;
    return outcome;
  }
  outcome.status = UpdateStatus::kRejected;
  outcome.reason = RejectReason::kNotLowerEntropy;
  return outcome;
}

CacheEntry DynamicCache::MaterializeRow(std::size_t row) const {
  const Row& r = rows_[row];
  CacheEntry e;
  e.key = FeatureVector::FromStored(
      std::span<const float>(keys_).subspan(row * dim_, dim_));
  e.value.assign(num_classes(), 0.0);
  for (const LabelEntry& l : r.labels) e.value[l.class_id] = l.value;
  e.entropy = r.entropy;
  e.arrival = r.arrival;
  return e;
}

std::vector<CacheEntry> DynamicCache::Entries(std::size_t class_id) const {
  class_size(class_id);  // range check
  std::vector<CacheEntry> out;
  out.reserve(queues_[class_id].size());
  for (std::size_t row : queues_[class_id]) out.push_back(MaterializeRow(row));
  return out;
}

CacheMatrices DynamicCache::AsMatrices() const {
  CacheMatrices m;
  m.rows = rows_.size();
  m.dim = dim_;
  m.num_classes = num_classes();
  m.keys.reserve(m.rows * dim_);
  m.values.assign(m.rows * m.num_classes, 0.0);
  std::size_t out_row = 0;
  for (const auto& queue : queues_) {
    for (std::size_t row : queue) {
      const auto key = std::span<const float>(keys_).subspan(row * dim_, dim_);
      m.keys.insert(m.keys.end(), key.begin(), key.end());
      for (const LabelEntry& l : rows_[row].labels) {
        m.values[out_row * m.num_classes + l.class_id] = l.value;
      }
      ++out_row;
    }
  }
  return m;
}

void DynamicCache::Clear() {
  rows_.clear();
  keys_.clear();
  for (auto& q : queues_) q.clear();
}

DynamicCache LoadStaticCache(const CacheMatrices& support) {
  std::vector<std::size_t> per_class(support.num_classes, 0);
  std::vector<std::size_t> class_of(support.rows, 0);
  for (std::size_t r = 0; r < support.rows; ++r) {
    const auto value = support.value(r);
    class_of[r] = Argmax(value);
    ++per_class[class_of[r]];
  }
  const std::size_t capacity =
      std::max<std::size_t>(1, *std::max_element(per_class.begin(), per_class.end()));
  DynamicCache cache(CacheKind::kPositive, support.num_classes, support.dim, capacity);
  for (std::size_t r = 0; r < support.rows; ++r) {
    const auto value = support.value(r);
    cache.Update(class_of[r],
                 CacheEntry{FeatureVector::FromStored(support.key(r)),
                            std::vector<double>(value.begin(), value.end()), 0.0, r});
  }
  return cache;
}

void NegativeSelection::Validate() const {
  if (!(entropy_low >= 0.0 && entropy_low < entropy_high && entropy_high <= 1.0)) {
    throw ConfigError("tau", "need 0 <= tau_l < tau_h <= 1, got [" +
                                 std::to_string(entropy_low) + ", " +
                                 std::to_string(entropy_high) + "]");
  }
  if (!(mask_threshold > 0.0 && mask_threshold < 1.0)) {
    throw ConfigError("p_l", "need 0 < p_l < 1, got " + std::to_string(mask_threshold));
  }
}

UpdateOutcome UpdatePositive(DynamicCache& cache, const FeatureVector& f,
                             const ProbabilityVector& p, double entropy,
                             std::uint64_t arrival) {
  const std::size_t cls = Argmax(p.values);
  CacheEntry entry{f, std::vector<double>(p.size(), 0.0), entropy, arrival};
  entry.value[cls] = 1.0;
  return cache.Update(cls, std::move(entry));
}

bool PassesEntropyGate(double entropy, double tau_l, double tau_h) {
  return tau_l < entropy && entropy < tau_h;
}

std::vector<double> NegativeMask(const ProbabilityVector& p, double p_l) {
  std::vector<double> mask(p.size(), 0.0);
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] > p_l) mask[c] = -1.0;
  }
  return mask;
}

UpdateOutcome UpdateNegative(DynamicCache& cache, const FeatureVector& f,
                             const ProbabilityVector& p, double entropy,
                             const NegativeSelection& selection, std::uint64_t arrival) {
  UpdateOutcome rejected;
  rejected.status = UpdateStatus::kRejected;
  if (!PassesEntropyGate(entropy, selection.entropy_low, selection.entropy_high)) {
    rejected.reason = RejectReason::kOutsideEntropyGate;
    return rejected;
  }
  std::vector<double> mask = NegativeMask(p, selection.mask_threshold);
  if (std::none_of(mask.begin(), mask.end(), [](double m) { return m != 0.0; })) {
    rejected.reason = RejectReason::kVacuousMask;
    return rejected;
  }
  const std::size_t cls = Argmax(p.values);
  return cache.Update(cls, CacheEntry{f, std::move(mask), entropy, arrival});
}

}  // namespace tda
