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

#include "tda/adapter.h"

#include <cmath>
#include <string>

#include "tda/error.h"

namespace tda {
namespace {

void AddInPlace(LogitVector& acc, const LogitVector& term) {
  for (std::size_t c = 0; c < acc.size(); ++c) acc.values[c] += term.values[c];
}

void CheckCacheShape(const FeatureVector& f, std::size_t dim, std::size_t num_classes,
                     std::size_t expected_classes) {
  if (f.dim() != dim) {
    throw Error(ErrorKind::kDimensionMismatch, "query dim " + std::to_string(f.dim()) +
                                                   ", cache dim " + std::to_string(dim));
  }
  if (num_classes != expected_classes) {
    throw Error(ErrorKind::kDimensionMismatch,
                "cache has " + std::to_string(num_classes) + " classes, head has " +
                    std::to_string(expected_classes));
  }
}

}  // namespace

void AdapterParams::Validate(const char* prefix) const {
  const std::string p(prefix);
  if (!std::isfinite(alpha) || alpha <= 0.0) throw ConfigError(p + "_alpha", "must be > 0");
  if (!std::isfinite(beta) || beta <= 0.0) throw ConfigError(p + "_beta", "must be > 0");
}

void TdaConfig::Validate() const {
  if (pos_capacity < 1) throw ConfigError("pos_capacity", "must be >= 1");
  if (neg_capacity < 1) throw ConfigError("neg_capacity", "must be >= 1");
  negative_selection().Validate();
  pos_params.Validate("pos");
  neg_params.Validate("neg");
  if (!std::isfinite(logit_scale) || logit_scale <= 0.0) {
    throw ConfigError("logit_scale", "must be > 0");
  }
}

double Adaptation(double affinity, const AdapterParams& params) {
  return params.alpha * std::exp(-params.beta * (1.0 - affinity));
}

std::vector<double> Adaptation(std::span<const double> affinities,
                               const AdapterParams& params) {
  std::vector<double> out(affinities.size());
  for (std::size_t i = 0; i < affinities.size(); ++i) {
    out[i] = Adaptation(affinities[i], params);
  }
  return out;
}

LogitVector CachePrediction(const FeatureVector& f, const CacheMatrices& cache,
                            const AdapterParams& params, CacheSign sign) {
  if (cache.rows > 0 && f.dim() != cache.dim) {
    throw Error(ErrorKind::kDimensionMismatch, "query dim " + std::to_string(f.dim()) +
                                                   ", cache dim " + std::to_string(cache.dim));
  }
  LogitVector out;
  out.values.assign(cache.num_classes, 0.0);
  const double s = static_cast<double>(static_cast<int>(sign));
  for (std::size_t r = 0; r < cache.rows; ++r) {
    const double weight = s * Adaptation(Dot(f.values(), cache.key(r)), params);
    const auto value = cache.value(r);
    for (std::size_t c = 0; c < cache.num_classes; ++c) {
      if (value[c] != 0.0) out.values[c] += weight * value[c];
    }
  }
  return out;
}

LogitVector CachePrediction(const FeatureVector& f, const DynamicCache& cache,
                            const AdapterParams& params, CacheSign sign) {
  if (f.dim() != cache.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "query dim " + std::to_string(f.dim()) +
                                                   ", cache dim " + std::to_string(cache.dim()));
  }
  LogitVector out;
  out.values.assign(cache.num_classes(), 0.0);
  const double s = static_cast<double>(static_cast<int>(sign));
  const std::size_t dim = cache.dim();
  const auto keys = cache.keys();
  for (std::size_t r = 0; r < cache.size(); ++r) {
    const double weight =
        s * Adaptation(Dot(f.values(), keys.subspan(r * dim, dim)), params);
    for (const LabelEntry& l : cache.labels(r)) out.values[l.class_id] += weight * l.value;
  }
  return out;
}

LogitVector TdaPredict(const FeatureVector& f, const ClassifierHead& head,
                       const DynamicCache& positive, const DynamicCache& negative,
                       const TdaConfig& config) {
  LogitVector logits = BaseLogits(f, head);
  CheckCacheShape(f, positive.dim(), positive.num_classes(), head.num_classes());
  CheckCacheShape(f, negative.dim(), negative.num_classes(), head.num_classes());
  if (!positive.empty()) {
    AddInPlace(logits, CachePrediction(f, positive, config.pos_params, CacheSign::kPositive));
  }
  if (!negative.empty()) {
    AddInPlace(logits, CachePrediction(f, negative, config.neg_params, CacheSign::kNegative));
  }
  return logits;
}

LogitVector TipAdapterPredict(const FeatureVector& f, const ClassifierHead& head,
                              const CacheMatrices& support, const AdapterParams& params) {
  LogitVector logits = BaseLogits(f, head);
  if (support.rows == 0) return logits;
  CheckCacheShape(f, support.dim, support.num_classes, head.num_classes());
  AddInPlace(logits, CachePrediction(f, support, params, CacheSign::kPositive));
  return logits;
}

LogitVector TipAdapterPredict(const FeatureVector& f, const ClassifierHead& head,
                              const DynamicCache& support, const AdapterParams& params) {
  LogitVector logits = BaseLogits(f, head);
  if (support.empty()) return logits;
  CheckCacheShape(f, support.dim(), support.num_classes(), head.num_classes());
  AddInPlace(logits, CachePrediction(f, support, params, CacheSign::kPositive));
  return logits;
}

}  // namespace tda
