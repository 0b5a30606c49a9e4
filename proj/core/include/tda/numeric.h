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

// Dense math shared by the caches and the adapter. Stored embeddings are
// 32-bit; every reduction accumulates in double.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tda {

// Stored vectors whose L2 norm is within this distance of 1 are accepted
// bit-for-bit instead of being divided again.
inline constexpr double kUnitNormSlack = 1e-6;

// Unit-norm embedding of dimension D. Instances only come out of
// L2Normalize / FeatureVector::FromStored, so the norm invariant always holds.
class FeatureVector {
 public:
  FeatureVector() = default;

  // Accepts 32-bit values read from storage. Finite, non-zero input is kept
  // as-is when already unit-norm (within kUnitNormSlack) and re-normalized
  // otherwise. Throws InvalidFeature on zero or non-finite input.
  static FeatureVector FromStored(std::span<const float> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  float operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  explicit FeatureVector(std::vector<float> values) : values_(std::move(values)) {}

  friend FeatureVector L2Normalize(std::span<const double> v);

  std::vector<float> values_;
};

// Unnormalized class scores, length N.
struct LogitVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

// Softmax output, length N; entries in [0, 1] summing to 1.
struct ProbabilityVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

// Frozen text-embedding matrix W_c (N x D, unit-norm rows) and the multiplier
// applied to cosine similarities before softmax.
class ClassifierHead {
 public:
  ClassifierHead() = default;
  // `weights` is row-major N x D. Rows go through FeatureVector::FromStored.
  ClassifierHead(std::size_t num_classes, std::size_t dim,
                 std::span<const float> weights, double logit_scale);

  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t dim() const noexcept { return dim_; }
  double logit_scale() const noexcept { return logit_scale_; }
  std::span<const float> row(std::size_t c) const {
    return std::span<const float>(weights_).subspan(c * dim_, dim_);
  }
  std::span<const float> weights() const noexcept { return weights_; }

 private:
  std::size_t num_classes_ = 0;
  std::size_t dim_ = 0;
  double logit_scale_ = 1.0;
  std::vector<float> weights_;
};

// Inner product with double accumulation. Fixed association order, so the
// result does not depend on which SIMD clone runs.
double Dot(std::span<const float> a, std::span<const float> b);

// out[j] = Dot(queries[j], key) for every query, each pointing at key.size()
// floats. Results are bitwise equal to separate Dot calls.
void DotMany(std::span<const float> key, std::span<const float* const> queries,
             std::span<double> out);

FeatureVector L2Normalize(std::span<const double> v);
FeatureVector L2Normalize(std::span<const float> v);

// Max-subtracted softmax. Throws InvalidFeature on non-finite logits.
ProbabilityVector Softmax(const LogitVector& logits);

// Shannon entropy (natural log, 0 ln 0 = 0) divided by ln(N); lies in [0, 1].
// Throws InvalidDimension when N < 2.
double NormalizedEntropy(const ProbabilityVector& p);

// logit_scale * (f . W_c^T). Throws DimensionMismatch when f.dim() != D.
LogitVector BaseLogits(const FeatureVector& f, const ClassifierHead& head);

// Index of the largest entry; ties go to the lowest index.
std::size_t Argmax(std::span<const double> values);

}  // namespace tda
