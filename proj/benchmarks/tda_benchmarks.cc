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

// Microbenchmarks for the hot paths: affinity dot products, base logits,
// cache updates and blocked streaming.

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "tda/dataset.h"
#include "tda/dynamic_cache.h"
#include "tda/engine.h"
#include "tda/harness.h"
#include "tda/numeric.h"
#include "tda/rng.h"
#include "tda/synthetic.h"

namespace tda {
namespace {

FeatureVector RandomUnit(std::size_t dim, Xoshiro256& rng) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.Normal();
  return L2Normalize(std::span<const double>(v));
}

void BM_Dot(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  Xoshiro256 rng(1);
  const FeatureVector a = RandomUnit(dim, rng);
  const FeatureVector b = RandomUnit(dim, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Dot(a.values(), b.values()));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Dot)->Arg(64)->Arg(512)->Arg(1024);

void BM_DotMany16(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  Xoshiro256 rng(2);
  const FeatureVector key = RandomUnit(dim, rng);
  std::vector<FeatureVector> queries;
  std::vector<const float*> ptrs;
  for (int i = 0; i < 16; ++i) queries.push_back(RandomUnit(dim, rng));
  for (const FeatureVector& q : queries) ptrs.push_back(q.values().data());
  std::vector<double> out(16);
  for (auto _ : state) {
    DotMany(key.values(), ptrs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_DotMany16)->Arg(64)->Arg(512)->Arg(1024);

void BM_BaseLogits(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  Xoshiro256 rng(3);
  std::vector<float> weights;
  for (std::size_t c = 0; c < n; ++c) {
    const FeatureVector row = RandomUnit(dim, rng);
    weights.insert(weights.end(), row.values().begin(), row.values().end());
  }
  const ClassifierHead head(n, dim, weights, 100.0);
  const FeatureVector f = RandomUnit(dim, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BaseLogits(f, head));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BaseLogits)->Args({64, 20})->Args({512, 1000});

void BM_PositiveUpdate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t kDim = 64;
  Xoshiro256 rng(4);
  std::vector<FeatureVector> features;
  std::vector<ProbabilityVector> probs;
  for (int i = 0; i < 1024; ++i) {
    features.push_back(RandomUnit(kDim, rng));
    LogitVector logits;
    logits.values.resize(n);
    for (double& x : logits.values) x = 5.0 * rng.Normal();
    probs.push_back(Softmax(logits));
  }
  DynamicCache cache(CacheKind::kPositive, n, kDim, 3);
  std::uint64_t t = 0;
  for (auto _ : state) {
    const std::size_t i = t % features.size();
    const ProbabilityVector& p = probs[i];
    benchmark::DoNotOptimize(UpdatePositive(cache, features[i], p, NormalizedEntropy(p), t));
    ++t;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PositiveUpdate)->Arg(20)->Arg(1000);

void BM_StreamTdaFull(benchmark::State& state) {
  SynthShiftSpec spec;
  spec.dim = static_cast<std::size_t>(state.range(0));
  spec.num_classes = static_cast<std::size_t>(state.range(1));
  spec.samples_per_class = 4000 / spec.num_classes;
  spec.shift_angle = 1.2;
  spec.noise_sigma = 0.1;
  const EmbeddingDataset ds = GenerateSynthetic(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunStream(ds, TdaConfig{}, Method::kTdaFull));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.samples.size()));
}
BENCHMARK(BM_StreamTdaFull)->Args({64, 20})->Args({512, 100})->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace tda

BENCHMARK_MAIN();
