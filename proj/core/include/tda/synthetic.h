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

// Desk-scale stand-in for a distribution-shifted benchmark.
//
// Text prototypes are N random unit vectors. Image features for class c are
// R(theta) w_c + sigma * g, re-normalized, where g ~ N(0, I_D) and R(theta) is
// a seeded random orthogonal transform that turns every vector by exactly
// theta (for even D): with a random orthonormal basis Q, coordinates in Q are
// rotated pairwise, (y_{2i}, y_{2i+1}) by theta, and mapped back. For odd D
// the last basis direction is left fixed.
//
// prototype_seed drives prototypes and Q; stream_seed drives sample order and
// noise. All randomness comes from tda::Xoshiro256.

#pragma once

#include <cstddef>
#include <cstdint>

#include "tda/dataset.h"

namespace tda {

struct ClassPrior {
  enum class Kind { kUniform, kZipf };
  Kind kind = Kind::kUniform;
  double exponent = 1.0;  // zipf only: weight of class c is 1 / (c + 1)^exponent
};

struct SynthShiftSpec {
  std::size_t dim = 64;
  std::size_t num_classes = 20;
  std::size_t samples_per_class = 200;
  std::uint64_t prototype_seed = 1;
  std::uint64_t stream_seed = 2;
  double shift_angle = 0.0;  // radians, [0, pi/2]
  double noise_sigma = 0.0;  // per-coordinate standard deviation
  ClassPrior prior;

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

// Per-class sample counts. Uniform: samples_per_class each. Zipf: the total
// N * samples_per_class split proportionally to the weights, at least 1 each.
std::vector<std::size_t> ClassCounts(const SynthShiftSpec& spec);

EmbeddingDataset GenerateSynthetic(const SynthShiftSpec& spec);

}  // namespace tda
