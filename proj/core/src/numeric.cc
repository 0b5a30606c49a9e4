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

#include "tda/numeric.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tda/error.h"

#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__linux__)
#define TDA_DOT_CLONES [[gnu::target_clones("avx512f", "avx2", "default")]]
#else
#define TDA_DOT_CLONES
#endif

namespace tda {
namespace {

constexpr std::size_t kLanes = 16;

TDA_DOT_CLONES
double DotKernel(const float* a, const float* b, std::size_t n) {
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      acc[l] += static_cast<double>(a[i + l]) * static_cast<double>(b[i + l]);
    }
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < kLanes; ++l) sum += acc[l];
  for (; i < n; ++i) sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return sum;
}

// Four dot products against a shared key. Each result follows the same
// lane assignment and reduction order as DotKernel, so values are identical.
TDA_DOT_CLONES
void DotKernel4(const float* key, const float* const* q, std::size_t n, double* out) {
  double acc[4][kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    double k[kLanes];
    for (std::size_t l = 0; l < kLanes; ++l) k[l] = static_cast<double>(key[i + l]);
    for (std::size_t j = 0; j < 4; ++j) {
      for (std::size_t l = 0; l < kLanes; ++l) {
        acc[j][l] += k[l] * static_cast<double>(q[j][i + l]);
      }
    }
  }
  for (std::size_t j = 0; j < 4; ++j) {
    double sum = 0.0;
    for (std::size_t l = 0; l < kLanes; ++l) sum += acc[j][l];
    for (std::size_t t = i; t < n; ++t) {
      sum += static_cast<double>(q[j][t]) * static_cast<double>(key[t]);
    }
    out[j] = sum;
  }
}

template <typename T>
double CheckedSquaredNorm(std::span<const T> v) {
  double sq = 0.0;
  for (T x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::kInvalidFeature, "non-finite entry");
    }
    sq += static_cast<double>(x) * static_cast<double>(x);
  }
  if (sq == 0.0) throw Error(ErrorKind::kInvalidFeature, "zero vector");
  return sq;
}

}  // namespace

FeatureVector FeatureVector::FromStored(std::span<const float> values) {
  const double norm = std::sqrt(CheckedSquaredNorm(values));
  if (std::abs(norm - 1.0) <= kUnitNormSlack) {
    return FeatureVector(std::vector<float>(values.begin(), values.end()));
  }
  return L2Normalize(values);
}

FeatureVector L2Normalize(std::span<const double> v) {
  const double norm = std::sqrt(CheckedSquaredNorm(v));
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(v[i] / norm);
  }
  return FeatureVector(std::move(out));
}

FeatureVector L2Normalize(std::span<const float> v) {
  std::vector<double> wide(v.begin(), v.end());
  return L2Normalize(std::span<const double>(wide));
}

ClassifierHead::ClassifierHead(std::size_t num_classes, std::size_t dim,
                               std::span<const float> weights, double logit_scale)
    : num_classes_(num_classes), dim_(dim), logit_scale_(logit_scale) {
  if (num_classes == 0 || dim == 0) {
    throw Error(ErrorKind::kInvalidDimension, "classifier head needs N >= 1 and D >= 1");
  }
  if (weights.size() != num_classes * dim) {
    throw Error(ErrorKind::kDimensionMismatch,
                "head has " + std::to_string(weights.size()) + " values, expected " +
                    std::to_string(num_classes * dim));
  }
  if (!std::isfinite(logit_scale) || logit_scale <= 0.0) {
    throw ConfigError("logit_scale", "must be positive and finite");
  }
  weights_.reserve(weights.size());
  for (std::size_t c = 0; c < num_classes; ++c) {
    const FeatureVector row = FeatureVector::FromStored(weights.subspan(c * dim, dim));
    weights_.insert(weights_.end(), row.values().begin(), row.values().end());
  }
}

double Dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  return DotKernel(a.data(), b.data(), a.size());
}

void DotMany(std::span<const float> key, std::span<const float* const> queries,
             std::span<double> out) {
  if (queries.size() != out.size()) {
    throw Error(ErrorKind::kDimensionMismatch, std::to_string(queries.size()) +
                                                   " queries vs " + std::to_string(out.size()) +
                                                   " outputs");
  }
  const std::size_t n = key.size();
  std::size_t j = 0;
  for (; j + 4 <= queries.size(); j += 4) DotKernel4(key.data(), &queries[j], n, &out[j]);
  for (; j < queries.size(); ++j) out[j] = DotKernel(queries[j], key.data(), n);
}

ProbabilityVector Softmax(const LogitVector& logits) {
  ProbabilityVector p;
  p.values.resize(logits.size());
  if (logits.size() == 0) return p;
  double max_logit = logits[0];
  for (double l : logits.values) {
    if (!std::isfinite(l)) throw Error(ErrorKind::kInvalidFeature, "non-finite logit");
    max_logit = std::max(max_logit, l);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p.values[i] = std::exp(logits[i] - max_logit);
    total += p.values[i];
  }
  for (double& x : p.values) x /= total;
  return p;
}

double NormalizedEntropy(const ProbabilityVector& p) {
  if (p.size() < 2) {
    throw Error(ErrorKind::kInvalidDimension,
                "entropy needs at least 2 classes, got " + std::to_string(p.size()));
  }
  double h = 0.0;
  for (double x : p.values) {
    if (x > 0.0) h -= x * std::log(x);
  }
  const double normalized = h / std::log(static_cast<double>(p.size()));
  return std::clamp(normalized, 0.0, 1.0);
}

LogitVector BaseLogits(const FeatureVector& f, const ClassifierHead& head) {
  if (f.dim() != head.dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "feature dim " + std::to_string(f.dim()) + ", head dim " +
                    std::to_string(head.dim()));
  }
  LogitVector out;
  out.values.resize(head.num_classes());
  const float* q = f.values().data();
  for (std::size_t c = 0; c < head.num_classes(); ++c) {
    out.values[c] = head.logit_scale() * DotKernel(head.row(c).data(), q, head.dim());
  }
  return out;
}

std::size_t Argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace tda
