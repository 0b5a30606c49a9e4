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

#include "tda/dataset.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "tda/error.h"
#include "test_util.h"

namespace tda {
namespace {

using ::tda::testing::RandomFeature;

EmbeddingDataset RandomDataset(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                               std::size_t samples) {
  EmbeddingDataset ds;
  ds.dim = dim;
  ds.num_classes = n;
  for (std::size_t c = 0; c < n; ++c) {
    ds.class_names.push_back("class " + std::to_string(c) + (c % 2 ? " \xc3\xa9t\xc3\xa9" : ""));
    const FeatureVector row = RandomFeature(rng, dim);
    ds.head.insert(ds.head.end(), row.values().begin(), row.values().end());
  }
  for (std::size_t i = 0; i < samples; ++i) {
    const std::int32_t label =
        rng() % 5 == 0 ? kUnlabeled : static_cast<std::int32_t>(rng() % n);
    ds.samples.push_back({label, RandomFeature(rng, dim)});
  }
  return ds;
}

// Independent little-endian writer for the documented layout.
void PutU32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void PutU64(std::vector<std::uint8_t>& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void PutF32(std::vector<std::uint8_t>& b, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  PutU32(b, bits);
}

std::string ErrorDetail(const std::vector<std::uint8_t>& bytes, ErrorKind* kind) {
  try {
    DecodeDataset(bytes);
  } catch (const Error& e) {
    *kind = e.kind();
    return e.what();
  }
  *kind = ErrorKind::kIoError;
  return "no error";
}

TEST(DatasetTest, RoundTripThreeClassesFiveSamples) {
  std::mt19937_64 rng(1);
  const EmbeddingDataset ds = RandomDataset(rng, 3, 6, 5);
  const std::filesystem::path path =
      std::filesystem::path(::testing::TempDir()) / "roundtrip.tdae";
  WriteDataset(ds, path);
  const EmbeddingDataset back = ReadDataset(path);
  EXPECT_EQ(back.dim, ds.dim);
  EXPECT_EQ(back.num_classes, ds.num_classes);
  EXPECT_EQ(back.class_names, ds.class_names);
  EXPECT_EQ(back.head, ds.head);
  ASSERT_EQ(back.samples.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(back.samples[i].label, ds.samples[i].label);
    EXPECT_EQ(back.samples[i].feature, ds.samples[i].feature);
  }
  EXPECT_EQ(back, ds);
  std::filesystem::remove(path);
}

TEST(DatasetTest, RandomizedRoundTripIdentity) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const EmbeddingDataset ds =
        RandomDataset(rng, 1 + rng() % 12, 1 + rng() % 40, rng() % 60);
    const std::vector<std::uint8_t> bytes = EncodeDataset(ds);
    EXPECT_EQ(DecodeDataset(bytes), ds);
    EXPECT_EQ(EncodeDataset(DecodeDataset(bytes)), bytes);
  }
}

TEST(DatasetTest, EncodingMatchesDocumentedLayout) {
  EmbeddingDataset ds;
  ds.dim = 2;
  ds.num_classes = 2;
  ds.class_names = {"cat", "dog"};
  ds.head = {1.0f, 0.0f, 0.0f, 1.0f};
  ds.samples.push_back({1, FeatureVector::FromStored(std::vector<float>{0.6f, 0.8f})});
  ds.samples.push_back({kUnlabeled, FeatureVector::FromStored(std::vector<float>{0.0f, 1.0f})});

  std::vector<std::uint8_t> expected = {'T', 'D', 'A', 'E'};
  PutU32(expected, 1);
  PutU32(expected, 2);
  PutU32(expected, 2);
  for (const char* name : {"cat", "dog"}) {
    PutU32(expected, 3);
    expected.insert(expected.end(), name, name + 3);
  }
  for (float x : ds.head) PutF32(expected, x);
  PutU64(expected, 2);
  PutU32(expected, 1);
  PutF32(expected, ds.samples[0].feature[0]);
  PutF32(expected, ds.samples[0].feature[1]);
  PutU32(expected, 0xFFFFFFFFu);
  PutF32(expected, 0.0f);
  PutF32(expected, 1.0f);
  EXPECT_EQ(EncodeDataset(ds), expected);
}

TEST(DatasetTest, AlteredMagicIsUnsupportedFormat) {
  std::mt19937_64 rng(3);
  std::vector<std::uint8_t> bytes = EncodeDataset(RandomDataset(rng, 3, 4, 5));
  bytes[0] = 'X';
  ErrorKind kind;
  ErrorDetail(bytes, &kind);
  EXPECT_EQ(kind, ErrorKind::kUnsupportedFormat);
}

TEST(DatasetTest, UnknownVersionIsUnsupportedFormat) {
  std::mt19937_64 rng(4);
  std::vector<std::uint8_t> bytes = EncodeDataset(RandomDataset(rng, 3, 4, 5));
  bytes[4] = 2;
  ErrorKind kind;
  ErrorDetail(bytes, &kind);
  EXPECT_EQ(kind, ErrorKind::kUnsupportedFormat);
}

TEST(DatasetTest, TruncatedRecordNamesIndex) {
  std::mt19937_64 rng(5);
  const EmbeddingDataset ds = RandomDataset(rng, 3, 4, 5);
  std::vector<std::uint8_t> bytes = EncodeDataset(ds);
  const std::size_t record = 4 + 4 * 4;
  // Cut in the middle of record 3.
  bytes.resize(bytes.size() - record - record / 2);
  ErrorKind kind;
  const std::string what = ErrorDetail(bytes, &kind);
  EXPECT_EQ(kind, ErrorKind::kCorruptDataset);
  EXPECT_NE(what.find("record 3"), std::string::npos) << what;
}

TEST(DatasetTest, EveryTruncationIsDetected) {
  std::mt19937_64 rng(6);
  const std::vector<std::uint8_t> bytes = EncodeDataset(RandomDataset(rng, 2, 3, 3));
  for (std::size_t len = 0; len < bytes.size(); ++len) {
    const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + len);
    ErrorKind kind;
    ErrorDetail(cut, &kind);
    if (len < 4) {
      EXPECT_EQ(kind, ErrorKind::kUnsupportedFormat) << len;
    } else {
      EXPECT_EQ(kind, ErrorKind::kCorruptDataset) << len;
    }
  }
}

TEST(DatasetTest, NanPayloadIsInvalidFeatureWithRecordIndex) {
  std::mt19937_64 rng(7);
  const EmbeddingDataset ds = RandomDataset(rng, 3, 4, 5);
  std::vector<std::uint8_t> bytes = EncodeDataset(ds);
  const std::size_t record = 4 + 4 * 4;
  const std::size_t offset = bytes.size() - 2 * record + 4 + 8;  // record 3, coordinate 2
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(&bytes[offset], &nan, 4);
  ErrorKind kind;
  const std::string what = ErrorDetail(bytes, &kind);
  EXPECT_EQ(kind, ErrorKind::kInvalidFeature);
  EXPECT_NE(what.find("record 3"), std::string::npos) << what;
}

TEST(DatasetTest, BadLabelAndTrailingBytesAreCorrupt) {
  std::mt19937_64 rng(8);
  const EmbeddingDataset ds = RandomDataset(rng, 3, 4, 2);
  std::vector<std::uint8_t> bytes = EncodeDataset(ds);
  std::vector<std::uint8_t> trailing = bytes;
  trailing.push_back(0);
  ErrorKind kind;
  ErrorDetail(trailing, &kind);
  EXPECT_EQ(kind, ErrorKind::kCorruptDataset);
  const std::size_t record = 4 + 4 * 4;
  bytes[bytes.size() - record] = 7;  // label 7 with N = 3
  ErrorDetail(bytes, &kind);
  EXPECT_EQ(kind, ErrorKind::kCorruptDataset);
}

TEST(DatasetTest, NonUnitFeaturesAreRenormalizedOnLoad) {
  EmbeddingDataset ds;
  ds.dim = 2;
  ds.num_classes = 1;
  ds.class_names = {"only"};
  ds.head = {1.0f, 0.0f};
  std::vector<std::uint8_t> bytes = EncodeDataset(ds);
  bytes.resize(bytes.size() - 8);
  PutU64(bytes, 1);
  PutU32(bytes, 0);
  PutF32(bytes, 3.0f);
  PutF32(bytes, 4.0f);
  const EmbeddingDataset back = DecodeDataset(bytes);
  ASSERT_EQ(back.samples.size(), 1u);
  EXPECT_FLOAT_EQ(back.samples[0].feature[0], 0.6f);
  EXPECT_FLOAT_EQ(back.samples[0].feature[1], 0.8f);
}

TEST(DatasetTest, MissingFileIsIoError) {
  EXPECT_EQ(testing::KindOf([] { ReadDataset("/nonexistent/dir/x.tdae"); }),
            ErrorKind::kIoError);
}

TEST(DatasetTest, HeadAndCounts) {
  std::mt19937_64 rng(9);
  const EmbeddingDataset ds = RandomDataset(rng, 4, 5, 30);
  const ClassifierHead head = ds.MakeHead(50.0);
  EXPECT_EQ(head.num_classes(), 4u);
  EXPECT_EQ(head.logit_scale(), 50.0);
  std::size_t labeled = 0;
  for (const Sample& s : ds.samples) labeled += s.label != kUnlabeled;
  EXPECT_EQ(ds.labeled_count(), labeled);
}

}  // namespace
}  // namespace tda
