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

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "tda/error.h"

namespace tda {
namespace {

static_assert(std::numeric_limits<float>::is_iec559, "TDAE stores IEEE-754 binary32");

template <typename T>
T ToLittle(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class ByteWriter {
 public:
  template <typename T>
  void Put(T v) {
    const T le = ToLittle(v);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&le);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void PutBytes(const std::string& s) { out_.insert(out_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool Has(std::size_t n) const { return bytes_.size() - pos_ >= n; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  // Caller checks Has() first.
  template <typename T>
  T Get() {
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return ToLittle(v);
  }
  std::string GetString(std::size_t n) {
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void GetFloats(std::span<float> out) {
    for (float& f : out) f = Get<float>();
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

[[noreturn]] void Corrupt(const std::string& what) {
  throw Error(ErrorKind::kCorruptDataset, what);
}

FeatureVector CheckedFeature(std::span<const float> values, const std::string& where) {
  try {
    return FeatureVector::FromStored(values);
  } catch (const Error& e) {
    throw Error(ErrorKind::kInvalidFeature, where + ": " + e.detail());
  }
}

}  // namespace

void EmbeddingDataset::Validate() const {
  if (dim == 0 || num_classes == 0) {
    throw Error(ErrorKind::kInvalidDimension, "dataset needs D >= 1 and N >= 1");
  }
  if (class_names.size() != num_classes) {
    throw Error(ErrorKind::kDimensionMismatch, "class name table has " +
                                                   std::to_string(class_names.size()) +
                                                   " entries for " +
                                                   std::to_string(num_classes) + " classes");
  }
  if (head.size() != num_classes * dim) {
    throw Error(ErrorKind::kDimensionMismatch, "head size does not match N x D");
  }
  const auto check_norm = [](std::span<const float> v, const std::string& where) {
    double sq = 0.0;
    for (float x : v) {
      if (!std::isfinite(x)) throw Error(ErrorKind::kInvalidFeature, where + ": non-finite");
      sq += static_cast<double>(x) * x;
    }
    if (std::abs(std::sqrt(sq) - 1.0) > 1e-3) {
      throw Error(ErrorKind::kInvalidFeature, where + ": not unit norm");
    }
  };
  for (std::size_t c = 0; c < num_classes; ++c) {
    check_norm(std::span<const float>(head).subspan(c * dim, dim),
               "head row " + std::to_string(c));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (s.feature.dim() != dim) {
      throw Error(ErrorKind::kDimensionMismatch, "record " + std::to_string(i) + " has dim " +
                                                     std::to_string(s.feature.dim()));
    }
    if (s.label != kUnlabeled &&
        (s.label < 0 || static_cast<std::size_t>(s.label) >= num_classes)) {
      throw Error(ErrorKind::kInvalidClass,
                  "record " + std::to_string(i) + " label " + std::to_string(s.label));
    }
    check_norm(s.feature.values(), "record " + std::to_string(i));
  }
}

ClassifierHead EmbeddingDataset::MakeHead(double logit_scale) const {
  return ClassifierHead(num_classes, dim, head, logit_scale);
}

std::size_t EmbeddingDataset::labeled_count() const {
  std::size_t n = 0;
  for (const Sample& s : samples) n += s.label != kUnlabeled;
  return n;
}

std::vector<std::uint8_t> EncodeDataset(const EmbeddingDataset& ds) {
  ds.Validate();
  ByteWriter w;
  w.PutBytes(std::string(kTdaeMagic, 4));
  w.Put<std::uint32_t>(kTdaeVersion);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(ds.dim));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(ds.num_classes));
  for (const std::string& name : ds.class_names) {
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    w.PutBytes(name);
  }
  for (float x : ds.head) w.Put<float>(x);
  w.Put<std::uint64_t>(ds.samples.size());
  for (const Sample& s : ds.samples) {
    w.Put<std::int32_t>(s.label);
    for (float x : s.feature.values()) w.Put<float>(x);
  }
  return w.Take();
}

EmbeddingDataset DecodeDataset(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.Has(4) || std::memcmp(bytes.data(), kTdaeMagic, 4) != 0) {
    throw Error(ErrorKind::kUnsupportedFormat, "missing TDAE magic");
  }
  r.GetString(4);
  if (!r.Has(12)) Corrupt("truncated header");
  const auto version = r.Get<std::uint32_t>();
  if (version != kTdaeVersion) {
    throw Error(ErrorKind::kUnsupportedFormat, "version " + std::to_string(version));
  }
  EmbeddingDataset ds;
  ds.dim = r.Get<std::uint32_t>();
  ds.num_classes = r.Get<std::uint32_t>();
  if (ds.dim == 0 || ds.num_classes == 0) Corrupt("zero dimension in header");

  for (std::size_t c = 0; c < ds.num_classes; ++c) {
    if (!r.Has(4)) Corrupt("truncated name table at class " + std::to_string(c));
    const auto len = r.Get<std::uint32_t>();
    if (!r.Has(len)) Corrupt("truncated name table at class " + std::to_string(c));
    ds.class_names.push_back(r.GetString(len));
  }

  const std::size_t head_bytes = ds.num_classes * ds.dim * sizeof(float);
  if (!r.Has(head_bytes)) Corrupt("truncated head matrix");
  std::vector<float> raw_head(ds.num_classes * ds.dim);
  r.GetFloats(raw_head);
  ds.head.reserve(raw_head.size());
  for (std::size_t c = 0; c < ds.num_classes; ++c) {
    const FeatureVector row =
        CheckedFeature(std::span<const float>(raw_head).subspan(c * ds.dim, ds.dim),
                       "head row " + std::to_string(c));
    ds.head.insert(ds.head.end(), row.values().begin(), row.values().end());
  }

  if (!r.Has(8)) Corrupt("truncated sample count");
  const auto count = r.Get<std::uint64_t>();
  const std::size_t record_bytes = sizeof(std::int32_t) + ds.dim * sizeof(float);
  ds.samples.reserve(static_cast<std::size_t>(
      std::min<std::uint64_t>(count, r.remaining() / record_bytes)));
  std::vector<float> buffer(ds.dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!r.Has(record_bytes)) {
      Corrupt("truncated at record " + std::to_string(i) + " of " + std::to_string(count));
    }
    Sample s;
    s.label = r.Get<std::int32_t>();
    if (s.label != kUnlabeled &&
        (s.label < 0 || static_cast<std::size_t>(s.label) >= ds.num_classes)) {
      Corrupt("record " + std::to_string(i) + " has label " + std::to_string(s.label));
    }
    r.GetFloats(buffer);
    s.feature = CheckedFeature(buffer, "record " + std::to_string(i));
    ds.samples.push_back(std::move(s));
  }
  if (r.remaining() != 0) {
    Corrupt(std::to_string(r.remaining()) + " trailing bytes after last record");
  }
  return ds;
}

void WriteDataset(const EmbeddingDataset& ds, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = EncodeDataset(ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIoError, "write failed: " + path.string());
}

EmbeddingDataset ReadDataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return DecodeDataset(bytes);
}

}  // namespace tda
