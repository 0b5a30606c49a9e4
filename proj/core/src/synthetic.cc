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

#include "tda/synthetic.h"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "tda/error.h"
#include "tda/rng.h"

namespace tda {
namespace {

using Matrix = std::vector<double>;  // row-major

// Rows of a D x D Gaussian matrix orthonormalized by modified Gram-Schmidt.
Matrix RandomOrthonormalBasis(std::size_t dim, Xoshiro256& rng) {
  Matrix q(dim * dim);
  for (double& x : q) x = rng.Normal();
  for (std::size_t i = 0; i < dim; ++i) {
    double* row = &q[i * dim];
    for (std::size_t j = 0; j < i; ++j) {
      const double* prev = &q[j * dim];
      double proj = 0.0;
      for (std::size_t k = 0; k < dim; ++k) proj += row[k] * prev[k];
      for (std::size_t k = 0; k < dim; ++k) row[k] -= proj * prev[k];
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < dim; ++k) norm += row[k] * row[k];
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < dim; ++k) row[k] /= norm;
  }
  return q;
}

std::vector<double> Rotate(std::span<const double> x, const Matrix& basis, double angle) {
  const std::size_t dim = x.size();
  std::vector<double> y(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = 0; k < dim; ++k) y[i] += basis[i * dim + k] * x[k];
  }
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (std::size_t i = 0; i + 1 < dim; i += 2) {
    const double a = y[i];
    const double b = y[i + 1];
    y[i] = c * a - s * b;
    y[i + 1] = s * a + c * b;
  }
  std::vector<double> out(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = 0; k < dim; ++k) out[k] += basis[i * dim + k] * y[i];
  }
  return out;
}

}  // namespace

void SynthShiftSpec::Validate() const {
  if (dim < 2) throw ConfigError("dim", "must be >= 2");
  if (num_classes < 2) throw ConfigError("num_classes", "must be >= 2");
  if (samples_per_class < 1) throw ConfigError("samples_per_class", "must be >= 1");
  if (!(shift_angle >= 0.0 && shift_angle <= std::numbers::pi / 2)) {
    throw ConfigError("shift_angle", "must lie in [0, pi/2]");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("noise_sigma", "must be >= 0");
  }
  if (prior.kind == ClassPrior::Kind::kZipf && !(prior.exponent > 0.0)) {
    throw ConfigError("zipf", "exponent must be > 0");
  }
}

std::vector<std::size_t> ClassCounts(const SynthShiftSpec& spec) {
  std::vector<std::size_t> counts(spec.num_classes, spec.samples_per_class);
  if (spec.prior.kind == ClassPrior::Kind::kUniform) return counts;
  std::vector<double> weights(spec.num_classes);
  double total_weight = 0.0;
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    weights[c] = 1.0 / std::pow(static_cast<double>(c + 1), spec.prior.exponent);
    total_weight += weights[c];
  }
  const double total = static_cast<double>(spec.num_classes * spec.samples_per_class);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    const double share = std::round(total * weights[c] / total_weight);
    counts[c] = share < 1.0 ? 1 : static_cast<std::size_t>(share);
  }
  return counts;
}

EmbeddingDataset GenerateSynthetic(const SynthShiftSpec& spec) {
  spec.Validate();
  const std::size_t dim = spec.dim;
  const std::size_t n = spec.num_classes;

  EmbeddingDataset ds;
  ds.dim = dim;
  ds.num_classes = n;
  for (std::size_t c = 0; c < n; ++c) {
    char name[32];
    std::snprintf(name, sizeof(name), "class_%03zu", c);
    ds.class_names.emplace_back(name);
  }

  Xoshiro256 proto_rng(spec.prototype_seed);
  std::vector<std::vector<double>> prototypes(n, std::vector<double>(dim));
  ds.head.reserve(n * dim);
  for (std::size_t c = 0; c < n; ++c) {
    for (double& x : prototypes[c]) x = proto_rng.Normal();
    const FeatureVector w = L2Normalize(std::span<const double>(prototypes[c]));
    ds.head.insert(ds.head.end(), w.values().begin(), w.values().end());
    // Centers start from the stored 32-bit prototype so a zero shift reproduces it.
    for (std::size_t k = 0; k < dim; ++k) prototypes[c][k] = w[k];
  }

  std::vector<std::vector<double>> centers = prototypes;
  if (spec.shift_angle > 0.0) {
    const Matrix basis = RandomOrthonormalBasis(dim, proto_rng);
    for (std::size_t c = 0; c < n; ++c) {
      centers[c] = Rotate(prototypes[c], basis, spec.shift_angle);
    }
  }

  std::vector<std::int32_t> labels;
  const std::vector<std::size_t> counts = ClassCounts(spec);
  for (std::size_t c = 0; c < n; ++c) labels.insert(labels.end(), counts[c], static_cast<std::int32_t>(c));

  Xoshiro256 stream_rng(spec.stream_seed);
  Shuffle(std::span<std::int32_t>(labels), stream_rng);

  ds.samples.reserve(labels.size());
  std::vector<double> x(dim);
  for (std::int32_t label : labels) {
    const auto& center = centers[static_cast<std::size_t>(label)];
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] = center[k] + spec.noise_sigma * stream_rng.Normal();
    }
    ds.samples.push_back({label, L2Normalize(std::span<const double>(x))});
  }
  return ds;
}

}  // namespace tda
