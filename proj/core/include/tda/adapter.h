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

// Prediction side: the affinity-to-weight adaptation function, cache
// retrieval, and the fused prediction (base logits + positive cache term +
// negative cache term), plus the zero-shot and static-cache baselines.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tda/dynamic_cache.h"
#include "tda/numeric.h"

namespace tda {

// A(z) = alpha * exp(-beta * (1 - z)).
struct AdapterParams {
  double alpha = 2.0;  // residual ratio
  double beta = 5.0;   // sharpness ratio

  // Throws ConfigError(<prefix>_alpha / <prefix>_beta).
  void Validate(const char* prefix) const;

  friend bool operator==(const AdapterParams&, const AdapterParams&) = default;
};

enum class UpdateOrder { kUpdateThenPredict, kPredictThenUpdate };

struct TdaConfig {
  std::size_t pos_capacity = 3;
  std::size_t neg_capacity = 2;
  double p_l = 0.03;
  double tau_l = 0.2;
  double tau_h = 0.5;
  AdapterParams pos_params;
  AdapterParams neg_params;
  double logit_scale = 100.0;
  UpdateOrder update_order = UpdateOrder::kUpdateThenPredict;

  // Throws ConfigError naming the first violated field.
  void Validate() const;

  NegativeSelection negative_selection() const { return {p_l, tau_l, tau_h}; }

  friend bool operator==(const TdaConfig&, const TdaConfig&) = default;
};

enum class CacheSign : int { kPositive = 1, kNegative = -1 };

double Adaptation(double affinity, const AdapterParams& params);
std::vector<double> Adaptation(std::span<const double> affinities, const AdapterParams& params);

// sign * A(f . keys^T) . values over a dense snapshot; zero logits for M = 0.
LogitVector CachePrediction(const FeatureVector& f, const CacheMatrices& cache,
                            const AdapterParams& params, CacheSign sign);

// Same quantity computed directly from a live cache's packed storage.
LogitVector CachePrediction(const FeatureVector& f, const DynamicCache& cache,
                            const AdapterParams& params, CacheSign sign);

// base + positive term + negative term. With both caches empty the result is
// exactly BaseLogits(f, head).
LogitVector TdaPredict(const FeatureVector& f, const ClassifierHead& head,
                       const DynamicCache& positive, const DynamicCache& negative,
                       const TdaConfig& config);

// Static labeled cache (keys = support features, values = one-hot labels)
// added to the base logits.
LogitVector TipAdapterPredict(const FeatureVector& f, const ClassifierHead& head,
                              const CacheMatrices& support, const AdapterParams& params);

// Same, with the support already packed by LoadStaticCache.
LogitVector TipAdapterPredict(const FeatureVector& f, const ClassifierHead& head,
                              const DynamicCache& support, const AdapterParams& params);

inline LogitVector ZeroShotPredict(const FeatureVector& f, const ClassifierHead& head) {
  return BaseLogits(f, head);
}

}  // namespace tda
