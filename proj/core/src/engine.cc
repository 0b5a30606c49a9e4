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

#include "tda/engine.h"

#include <string>
#include <utility>

#include "tda/error.h"

namespace tda {
namespace {

ClassifierHead Validated(ClassifierHead head, const TdaConfig& config) {
  config.Validate();
  return head;
}

void MarkTouched(const UpdateOutcome& outcome, std::vector<char>& touched) {
  if (outcome.accepted() && outcome.row < touched.size()) touched[outcome.row] = 1;
}

}  // namespace

StreamingAdapter::StreamingAdapter(ClassifierHead head, TdaConfig config, CacheArms arms)
    : head_(Validated(std::move(head), config)),
      config_(config),
      arms_(arms),
      positive_(CacheKind::kPositive, head_.num_classes(), head_.dim(), config.pos_capacity),
      negative_(CacheKind::kNegative, head_.num_classes(), head_.dim(), config.neg_capacity) {}

void StreamingAdapter::Update(const FeatureVector& f, const ProbabilityVector& p,
                              double entropy, StepResult& result, AffinitySnapshot* pos_snap,
                              AffinitySnapshot* neg_snap) {
  const std::uint64_t arrival = next_arrival_;
  if (arms_.positive) {
    result.positive_update = UpdatePositive(positive_, f, p, entropy, arrival);
    if (pos_snap != nullptr) MarkTouched(result.positive_update, pos_snap->touched);
  }
  if (arms_.negative) {
    result.negative_update =
        UpdateNegative(negative_, f, p, entropy, config_.negative_selection(), arrival);
    if (neg_snap != nullptr) MarkTouched(result.negative_update, neg_snap->touched);
  }
}

LogitVector StreamingAdapter::Fuse(const FeatureVector& f, LogitVector base) const {
  if (arms_.positive && !positive_.empty()) {
    const LogitVector term =
        CachePrediction(f, positive_, config_.pos_params, CacheSign::kPositive);
    for (std::size_t c = 0; c < base.size(); ++c) base.values[c] += term.values[c];
  }
  if (arms_.negative && !negative_.empty()) {
    const LogitVector term =
        CachePrediction(f, negative_, config_.neg_params, CacheSign::kNegative);
    for (std::size_t c = 0; c < base.size(); ++c) base.values[c] += term.values[c];
  }
  return base;
}

void StreamingAdapter::TakeSnapshot(const DynamicCache& cache,
                                    std::span<const FeatureVector* const> block,
                                    AffinitySnapshot& snap) {
  const std::size_t dim = cache.dim();
  const auto keys = cache.keys();
  snap.rows = cache.size();
  snap.z.resize(block.size() * snap.rows);
  snap.touched.assign(snap.rows, 0);
  std::vector<const float*> queries(block.size());
  for (std::size_t b = 0; b < block.size(); ++b) queries[b] = block[b]->values().data();
  std::vector<double> z(block.size());
  for (std::size_t r = 0; r < snap.rows; ++r) {
    DotMany(keys.subspan(r * dim, dim), queries, z);
    for (std::size_t b = 0; b < block.size(); ++b) snap.z[b * snap.rows + r] = z[b];
  }
}

// Mirrors CachePrediction(f, cache, ...) term by term, reading snapshot
// affinities where the row is unchanged.
void StreamingAdapter::AddCacheTerm(const DynamicCache& cache, const AffinitySnapshot& snap,
                                    std::size_t b, const FeatureVector& f,
                                    const AdapterParams& params, CacheSign sign,
                                    LogitVector& logits) {
  if (cache.empty()) return;
  std::vector<double> term(cache.num_classes(), 0.0);
  const double s = static_cast<double>(static_cast<int>(sign));
  const std::size_t dim = cache.dim();
  const auto keys = cache.keys();
  const double* z = snap.z.data() + b * snap.rows;
  for (std::size_t r = 0; r < cache.size(); ++r) {
    const double affinity = (r < snap.rows && !snap.touched[r])
                                ? z[r]
                                : Dot(f.values(), keys.subspan(r * dim, dim));
    const double weight = s * Adaptation(affinity, params);
    for (const LabelEntry& l : cache.labels(r)) term[l.class_id] += weight * l.value;
  }
  for (std::size_t c = 0; c < term.size(); ++c) logits.values[c] += term[c];
}

void StreamingAdapter::StepBlock(std::span<const FeatureVector* const> block,
                                 std::span<StepResult> results) {
  const std::size_t n = head_.num_classes();
  const std::size_t dim = head_.dim();
  for (const FeatureVector* f : block) {
    if (f->dim() != dim) {
      throw Error(ErrorKind::kDimensionMismatch, "feature dim " + std::to_string(f->dim()) +
                                                     ", head dim " + std::to_string(dim));
    }
  }

  // Base logits, head row outer so each row is read once per block.
  std::vector<LogitVector> base(block.size());
  for (auto& l : base) l.values.resize(n);
  std::vector<const float*> queries(block.size());
  for (std::size_t b = 0; b < block.size(); ++b) queries[b] = block[b]->values().data();
  std::vector<double> dots(block.size());
  for (std::size_t c = 0; c < n; ++c) {
    DotMany(head_.row(c), queries, dots);
    for (std::size_t b = 0; b < block.size(); ++b) {
      base[b].values[c] = head_.logit_scale() * dots[b];
    }
  }

  AffinitySnapshot pos_snap;
  AffinitySnapshot neg_snap;
  if (arms_.positive) TakeSnapshot(positive_, block, pos_snap);
  if (arms_.negative) TakeSnapshot(negative_, block, neg_snap);

  const bool update = updates_enabled_ && (arms_.positive || arms_.negative);
  for (std::size_t b = 0; b < block.size(); ++b) {
    const FeatureVector& f = *block[b];
    StepResult& result = results[b];
    result = StepResult{};
    const ProbabilityVector p = Softmax(base[b]);
    result.entropy = NormalizedEntropy(p);
    if (update && config_.update_order == UpdateOrder::kUpdateThenPredict) {
      Update(f, p, result.entropy, result, &pos_snap, &neg_snap);
    }
    result.logits = std::move(base[b]);
    if (arms_.positive) {
      AddCacheTerm(positive_, pos_snap, b, f, config_.pos_params, CacheSign::kPositive,
                   result.logits);
    }
    if (arms_.negative) {
      AddCacheTerm(negative_, neg_snap, b, f, config_.neg_params, CacheSign::kNegative,
                   result.logits);
    }
    if (update && config_.update_order == UpdateOrder::kPredictThenUpdate) {
      Update(f, p, result.entropy, result, &pos_snap, &neg_snap);
    }
    result.prediction = Argmax(result.logits.values);
    ++next_arrival_;
  }
}

StepResult StreamingAdapter::Step(const FeatureVector& f) {
  StepResult result;
  const FeatureVector* block[1] = {&f};
  StepBlock(block, std::span<StepResult>(&result, 1));
  return result;
}

LogitVector StreamingAdapter::Predict(const FeatureVector& f) const {
  return Fuse(f, BaseLogits(f, head_));
}

void StreamingAdapter::Reset() {
  positive_.Clear();
  negative_.Clear();
  next_arrival_ = 0;
}

}  // namespace tda
