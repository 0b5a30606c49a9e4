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

#include "tda/harness.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "tda/engine.h"
#include "tda/error.h"
#include "tda/rng.h"

namespace tda {
namespace {

constexpr std::array<Method, 5> kAllMethods = {
    Method::kZeroShot, Method::kTipAdapter, Method::kTdaPositiveOnly,
    Method::kTdaNegativeOnly, Method::kTdaFull};

using Clock = std::chrono::steady_clock;

// Samples per StreamingAdapter::StepBlock call; results do not depend on it.
constexpr std::size_t kStreamBlock = 16;

CacheMatrices BuildSupport(const EmbeddingDataset& stream, std::span<const std::size_t> order,
                           const RunOptions& options, std::size_t shots) {
  CacheMatrices m;
  m.dim = stream.dim;
  m.num_classes = stream.num_classes;
  const auto add = [&m](const Sample& s) {
    m.keys.insert(m.keys.end(), s.feature.values().begin(), s.feature.values().end());
    m.values.resize(m.values.size() + m.num_classes, 0.0);
    m.values[m.rows * m.num_classes + static_cast<std::size_t>(s.label)] = 1.0;
    ++m.rows;
  };
  if (options.support != nullptr) {
    const EmbeddingDataset& support = *options.support;
    if (support.dim != stream.dim || support.num_classes != stream.num_classes) {
      throw Error(ErrorKind::kDimensionMismatch, "support set shape differs from the stream");
    }
    for (const Sample& s : support.samples) {
      if (s.label != kUnlabeled) add(s);
    }
    return m;
  }
  std::vector<std::size_t> taken(stream.num_classes, 0);
  for (std::size_t idx : order) {
    const Sample& s = stream.samples[idx];
    if (s.label == kUnlabeled) continue;
    auto& n = taken[static_cast<std::size_t>(s.label)];
    if (n < shots) {
      add(s);
      ++n;
    }
  }
  return m;
}

std::int32_t LabelAt(const EmbeddingDataset& ds, std::span<const std::size_t> order,
                     std::uint64_t arrival) {
  return ds.samples[order[static_cast<std::size_t>(arrival)]].label;
}

CacheDumpSection DumpCache(const DynamicCache& cache, const char* name,
                           const EmbeddingDataset& ds, std::span<const std::size_t> order) {
  CacheDumpSection section;
  section.name = name;
  section.shot_capacity = cache.shot_capacity();
  for (std::size_t c = 0; c < cache.num_classes(); ++c) {
    for (const CacheEntry& e : cache.Entries(c)) {
      section.entries.push_back({c, e.entropy, e.arrival, LabelAt(ds, order, e.arrival)});
    }
  }
  return section;
}

CacheStats StatsFromSection(const CacheDumpSection& section, std::size_t num_classes) {
  CacheStats stats;
  stats.entries = section.entries.size();
  stats.capacity = num_classes * section.shot_capacity;
  stats.fill_ratio = stats.capacity == 0 ? 0.0
                                         : static_cast<double>(stats.entries) /
                                               static_cast<double>(stats.capacity);
  std::size_t labeled = 0;
  std::size_t matching = 0;
  double entropy_sum = 0.0;
  for (const DumpedEntry& e : section.entries) {
    entropy_sum += e.entropy;
    if (e.label != kUnlabeled) {
      ++labeled;
      matching += static_cast<std::size_t>(e.label) == e.class_id;
    }
  }
  if (stats.entries > 0) stats.mean_entropy = entropy_sum / static_cast<double>(stats.entries);
  if (labeled > 0) stats.purity = static_cast<double>(matching) / static_cast<double>(labeled);
  return stats;
}

std::string FormatOptional(const std::optional<double>& v, const char* fmt) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, *v);
  return buf;
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kZeroShot: return "zero-shot";
    case Method::kTipAdapter: return "tip-adapter";
    case Method::kTdaPositiveOnly: return "tda-positive";
    case Method::kTdaNegativeOnly: return "tda-negative";
    case Method::kTdaFull: return "tda";
  }
  return "unknown";
}

Method ParseMethod(std::string_view name) {
  for (Method m : kAllMethods) {
    if (MethodName(m) == name) return m;
  }
  throw ConfigError("method", "unknown method '" + std::string(name) +
                                  "' (zero-shot, tip-adapter, tda-positive, tda-negative, tda)");
}

std::span<const Method> AllMethods() { return kAllMethods; }

RunReport RunStream(const EmbeddingDataset& ds, const TdaConfig& config, Method method,
                    const RunOptions& options) {
  config.Validate();
  const ClassifierHead head = ds.MakeHead(config.logit_scale);
  const std::size_t n = ds.samples.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (options.shuffle_seed) {
    Xoshiro256 rng(*options.shuffle_seed);
    Shuffle(std::span<std::size_t>(order), rng);
  }

  std::vector<std::size_t> predictions(n);
  std::optional<StreamingAdapter> adapter;

  // Every method runs through the blocked streaming engine. Zero-shot enables
  // no cache; Tip-Adapter enables a preloaded positive cache with updates off.
  const CacheArms arms{method != Method::kZeroShot && method != Method::kTdaNegativeOnly,
                       method == Method::kTdaNegativeOnly || method == Method::kTdaFull};
  adapter.emplace(head, config, arms);
  const bool adaptive = method != Method::kZeroShot && method != Method::kTipAdapter;
  if (method == Method::kTipAdapter) {
    adapter->mutable_positive() =
        LoadStaticCache(BuildSupport(ds, order, options, config.pos_capacity));
    adapter->set_updates_enabled(false);
  }
  std::vector<const FeatureVector*> block;
  std::vector<StepResult> results(kStreamBlock);
  const Clock::time_point start = Clock::now();
  for (std::size_t t0 = 0; t0 < n; t0 += kStreamBlock) {
    const std::size_t len = std::min(kStreamBlock, n - t0);
    block.clear();
    for (std::size_t t = t0; t < t0 + len; ++t) block.push_back(&ds.samples[order[t]].feature);
    adapter->StepBlock(block, std::span<StepResult>(results.data(), len));
    for (std::size_t i = 0; i < len; ++i) predictions[t0 + i] = results[i].prediction;
  }
  const Clock::time_point stop = Clock::now();

  RunReport report;
  report.method = method;
  report.samples_processed = n;
  std::vector<std::size_t> class_total(ds.num_classes, 0);
  std::vector<std::size_t> class_correct(ds.num_classes, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const std::int32_t label = ds.samples[order[t]].label;
    if (label == kUnlabeled) continue;
    const auto c = static_cast<std::size_t>(label);
    ++class_total[c];
    if (predictions[t] == c) {
      ++class_correct[c];
      ++report.correct;
    }
    ++report.labeled_samples;
  }
  if (report.labeled_samples > 0) {
    report.top1_accuracy = 100.0 * static_cast<double>(report.correct) /
                           static_cast<double>(report.labeled_samples);
  }
  report.per_class_accuracy.resize(ds.num_classes);
  for (std::size_t c = 0; c < ds.num_classes; ++c) {
    if (class_total[c] > 0) {
      report.per_class_accuracy[c] =
          100.0 * static_cast<double>(class_correct[c]) / static_cast<double>(class_total[c]);
    }
  }
  report.wall_time_s = std::chrono::duration<double>(stop - start).count();
  report.throughput = report.wall_time_s > 0.0 ? static_cast<double>(n) / report.wall_time_s : 0.0;

  CacheDump dump;
  dump.method = std::string(MethodName(method));
  dump.num_classes = ds.num_classes;
  if (adaptive) {
    if (adapter->arms().positive) {
      dump.caches.push_back(DumpCache(adapter->positive(), "positive", ds, order));
      report.positive_cache = StatsFromSection(dump.caches.back(), ds.num_classes);
    }
    if (adapter->arms().negative) {
      dump.caches.push_back(DumpCache(adapter->negative(), "negative", ds, order));
      report.negative_cache = StatsFromSection(dump.caches.back(), ds.num_classes);
    }
  }
  if (options.dump != nullptr) *options.dump = std::move(dump);
  return report;
}

std::vector<RunReport> Compare(const EmbeddingDataset& ds, const TdaConfig& config,
                               const RunOptions& options) {
  std::vector<RunReport> reports;
  RunOptions per_run = options;
  per_run.dump = nullptr;
  for (Method m : kAllMethods) reports.push_back(RunStream(ds, config, m, per_run));
  return reports;
}

SeedSummary SummarizeAccuracy(std::span<const RunReport> reports) {
  SeedSummary s;
  s.runs = reports.size();
  if (reports.empty()) return s;
  for (const RunReport& r : reports) s.mean += r.top1_accuracy;
  s.mean /= static_cast<double>(reports.size());
  if (reports.size() > 1) {
    double ss = 0.0;
    for (const RunReport& r : reports) ss += (r.top1_accuracy - s.mean) * (r.top1_accuracy - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(reports.size() - 1));
  }
  return s;
}

GridSpec GridSpec::Singleton(const TdaConfig& base, Method method) {
  GridSpec g;
  g.pos_capacity = {base.pos_capacity};
  g.neg_capacity = {base.neg_capacity};
  g.p_l = {base.p_l};
  g.tau_l = {base.tau_l};
  g.tau_h = {base.tau_h};
  g.alpha = {base.pos_params.alpha};
  g.beta = {base.pos_params.beta};
  g.method = method;
  return g;
}

std::size_t GridSpec::combinations() const {
  const std::array<std::size_t, 7> sizes = {pos_capacity.size(), neg_capacity.size(),
                                            p_l.size(),          tau_l.size(),
                                            tau_h.size(),        alpha.size(),
                                            beta.size()};
  std::size_t total = 1;
  for (std::size_t s : sizes) {
    if (s != 0 && total > std::numeric_limits<std::size_t>::max() / s) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= s;
  }
  return total;
}

GridResult GridSearch(const EmbeddingDataset& ds, const GridSpec& spec, const TdaConfig& base,
                      std::size_t threads, const RunOptions& options) {
  const std::array<std::pair<const char*, std::size_t>, 7> lists = {{
      {"pos_capacity", spec.pos_capacity.size()},
      {"neg_capacity", spec.neg_capacity.size()},
      {"p_l", spec.p_l.size()},
      {"tau_l", spec.tau_l.size()},
      {"tau_h", spec.tau_h.size()},
      {"alpha", spec.alpha.size()},
      {"beta", spec.beta.size()},
  }};
  for (const auto& [name, size] : lists) {
    if (size == 0) throw ConfigError(name, "grid value list is empty");
  }
  const std::size_t total = spec.combinations();
  if (total > spec.max_combinations) {
    throw Error(ErrorKind::kGridTooLarge, std::to_string(total) + " combinations exceed the limit of " +
                                              std::to_string(spec.max_combinations));
  }

  GridResult result;
  std::vector<GridRow> pending;
  for (std::size_t index = 0; index < total; ++index) {
    std::size_t rest = index;
    const auto pick = [&rest](const auto& values) {
      const auto& v = values[rest % values.size()];
      rest /= values.size();
      return v;
    };
    // Last list varies fastest.
    TdaConfig cfg = base;
    cfg.pos_params.beta = cfg.neg_params.beta = pick(spec.beta);
    cfg.pos_params.alpha = cfg.neg_params.alpha = pick(spec.alpha);
    cfg.tau_h = pick(spec.tau_h);
    cfg.tau_l = pick(spec.tau_l);
    cfg.p_l = pick(spec.p_l);
    cfg.neg_capacity = pick(spec.neg_capacity);
    cfg.pos_capacity = pick(spec.pos_capacity);
    if (!(cfg.tau_l < cfg.tau_h)) {
      ++result.skipped;
      continue;
    }
    cfg.Validate();
    pending.push_back({index, cfg, {}});
  }

  RunOptions per_run = options;
  per_run.dump = nullptr;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(pending.size(), 1));

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&] {
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      try {
        pending[i].report = RunStream(ds, pending[i].config, spec.method, per_run);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::sort(pending.begin(), pending.end(), [](const GridRow& a, const GridRow& b) {
    if (a.report.top1_accuracy != b.report.top1_accuracy) {
      return a.report.top1_accuracy > b.report.top1_accuracy;
    }
    if (a.report.wall_time_s != b.report.wall_time_s) {
      return a.report.wall_time_s < b.report.wall_time_s;
    }
    return a.index < b.index;
  });
  result.rows = std::move(pending);
  result.best = result.rows.empty() ? base : result.rows.front().config;
  return result;
}

std::string FormatReportsText(std::span<const RunReport> reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-14s %8s %9s %9s %10s %14s %9s %9s %9s %9s\n", "method",
                "top1(%)", "samples", "labeled", "wall(s)", "samples/s", "pos_fill",
                "pos_pur", "neg_fill", "neg_pur");
  out << line;
  for (const RunReport& r : reports) {
    const auto fill = [](const std::optional<CacheStats>& s) {
      return s ? FormatOptional(s->fill_ratio, "%.3f") : std::string("-");
    };
    const auto purity = [](const std::optional<CacheStats>& s) {
      return s && s->purity ? FormatOptional(s->purity, "%.3f") : std::string("-");
    };
    std::snprintf(line, sizeof(line), "%-14s %8.2f %9zu %9zu %10.4f %14.1f %9s %9s %9s %9s\n",
                  std::string(MethodName(r.method)).c_str(), r.top1_accuracy,
                  r.samples_processed, r.labeled_samples, r.wall_time_s, r.throughput,
                  fill(r.positive_cache).c_str(), purity(r.positive_cache).c_str(),
                  fill(r.negative_cache).c_str(), purity(r.negative_cache).c_str());
    out << line;
  }
  out << "timing covers cache updates and prediction only; "
         "dataset loading and feature extraction are excluded\n";
  return out.str();
}

std::string FormatReportsCsv(std::span<const RunReport> reports) {
  std::ostringstream out;
  out << "method,top1_accuracy,samples_processed,labeled_samples,correct,wall_time_s,"
         "throughput,pos_entries,pos_fill_ratio,pos_mean_entropy,pos_purity,"
         "neg_entries,neg_fill_ratio,neg_mean_entropy,neg_purity\n";
  const auto cache_cols = [](const std::optional<CacheStats>& s) {
    if (!s) return std::string(",,,");
    return std::to_string(s->entries) + "," + FormatOptional(s->fill_ratio, "%.6f") + "," +
           FormatOptional(s->mean_entropy, "%.6f") + "," + FormatOptional(s->purity, "%.6f");
  };
  char buf[160];
  for (const RunReport& r : reports) {
    std::snprintf(buf, sizeof(buf), "%s,%.4f,%zu,%zu,%zu,%.6f,%.2f,",
                  std::string(MethodName(r.method)).c_str(), r.top1_accuracy,
                  r.samples_processed, r.labeled_samples, r.correct, r.wall_time_s,
                  r.throughput);
    out << buf << cache_cols(r.positive_cache) << "," << cache_cols(r.negative_cache) << "\n";
  }
  return out.str();
}

std::string FormatPerClassCsv(const RunReport& report) {
  std::ostringstream out;
  out << "class,accuracy\n";
  for (std::size_t c = 0; c < report.per_class_accuracy.size(); ++c) {
    out << c << "," << FormatOptional(report.per_class_accuracy[c], "%.4f") << "\n";
  }
  return out.str();
}

std::string FormatGridCsv(const GridResult& result) {
  std::ostringstream out;
  out << "rank,pos_capacity,neg_capacity,p_l,tau_l,tau_h,alpha,beta,top1_accuracy,"
         "wall_time_s,throughput\n";
  char buf[256];
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const GridRow& row = result.rows[i];
    const TdaConfig& c = row.config;
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%g,%g,%g,%g,%g,%.4f,%.6f,%.2f\n", i + 1,
                  c.pos_capacity, c.neg_capacity, c.p_l, c.tau_l, c.tau_h,
                  c.pos_params.alpha, c.pos_params.beta, row.report.top1_accuracy,
                  row.report.wall_time_s, row.report.throughput);
    out << buf;
  }
  return out.str();
}

}  // namespace tda
