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

// Embedding datasets and the TDAE binary container (docs/tdae-format.md).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tda/numeric.h"

namespace tda {

inline constexpr char kTdaeMagic[4] = {'T', 'D', 'A', 'E'};
inline constexpr std::uint32_t kTdaeVersion = 1;
inline constexpr std::int32_t kUnlabeled = -1;

struct Sample {
  std::int32_t label = kUnlabeled;  // class id, or -1 when unknown
  FeatureVector feature;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// A frozen text head plus an ordered stream of image features. Stream order is
// meaningful and is preserved by every reader and writer.
struct EmbeddingDataset {
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  std::vector<std::string> class_names;
  // Row-major N x D text embeddings, unit-norm rows.
  std::vector<float> head;
  std::vector<Sample> samples;

  // Checks shapes, label ranges and row norms (within 1e-3).
  void Validate() const;
  ClassifierHead MakeHead(double logit_scale) const;
  std::size_t labeled_count() const;

  friend bool operator==(const EmbeddingDataset&, const EmbeddingDataset&) = default;
};

std::vector<std::uint8_t> EncodeDataset(const EmbeddingDataset& ds);

// Errors: UnsupportedFormat (magic/version), CorruptDataset (truncation,
// trailing bytes, bad labels; names the record index), InvalidFeature
// (non-finite or zero vectors; names the record index).
EmbeddingDataset DecodeDataset(std::span<const std::uint8_t> bytes);

void WriteDataset(const EmbeddingDataset& ds, const std::filesystem::path& path);
EmbeddingDataset ReadDataset(const std::filesystem::path& path);

}  // namespace tda
