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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tda/error.h"
#include "tda/harness.h"

namespace tda {
namespace {

using nlohmann::json;

constexpr int kDumpVersion = 1;

double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::string Fixed(double v, const char* fmt = "%.4f") {
  char buf[32];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

void WriteCacheDump(const CacheDump& dump, const std::string& path) {
  json root;
  root["version"] = kDumpVersion;
  root["method"] = dump.method;
  root["num_classes"] = dump.num_classes;
  root["caches"] = json::array();
  for (const CacheDumpSection& section : dump.caches) {
    json entries = json::array();
    for (const DumpedEntry& e : section.entries) {
      entries.push_back({{"class", e.class_id},
                         {"entropy", e.entropy},
                         {"arrival", e.arrival},
                         {"label", e.label}});
    }
    root["caches"].push_back({{"name", section.name},
                              {"shot_capacity", section.shot_capacity},
                              {"entries", std::move(entries)}});
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write cache dump " + path);
  out << root.dump(1) << "\n";
}

CacheDump ReadCacheDump(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::kNoDumpAvailable,
                path + " not found; run with --dump-caches to produce one");
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open cache dump " + path);
  CacheDump dump;
  try {
    const json root = json::parse(in);
    if (root.at("version").get<int>() != kDumpVersion) {
      throw Error(ErrorKind::kUnsupportedFormat, "cache dump version mismatch");
    }
    dump.method = root.at("method").get<std::string>();
    dump.num_classes = root.at("num_classes").get<std::size_t>();
    for (const json& c : root.at("caches")) {
      CacheDumpSection section;
      section.name = c.at("name").get<std::string>();
      section.shot_capacity = c.at("shot_capacity").get<std::size_t>();
      for (const json& e : c.at("entries")) {
        section.entries.push_back({e.at("class").get<std::size_t>(),
                                   e.at("entropy").get<double>(),
                                   e.at("arrival").get<std::uint64_t>(),
                                   e.at("label").get<std::int32_t>()});
      }
      dump.caches.push_back(std::move(section));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kUnsupportedFormat, "malformed cache dump: " + std::string(e.what()));
  }
  return dump;
}

std::vector<CacheInspection> Inspect(const CacheDump& dump) {
  std::vector<CacheInspection> out;
  for (const CacheDumpSection& section : dump.caches) {
    CacheInspection ins;
    ins.name = section.name;
    ins.shot_capacity = section.shot_capacity;
    ins.entries = section.entries.size();
    const std::size_t capacity = dump.num_classes * section.shot_capacity;
    ins.fill_ratio = capacity == 0 ? 0.0
                                   : static_cast<double>(ins.entries) /
                                         static_cast<double>(capacity);

    std::vector<double> entropies;
    std::vector<std::size_t> count(dump.num_classes, 0);
    std::vector<std::size_t> labeled(dump.num_classes, 0);
    std::vector<std::size_t> matching(dump.num_classes, 0);
    for (const DumpedEntry& e : section.entries) {
      if (e.class_id >= dump.num_classes) {
        throw Error(ErrorKind::kInvalidClass, "dump entry class " + std::to_string(e.class_id));
      }
      entropies.push_back(e.entropy);
      ++count[e.class_id];
      if (e.label != kUnlabeled) {
        ++labeled[e.class_id];
        matching[e.class_id] += static_cast<std::size_t>(e.label) == e.class_id;
      }
    }
    if (!entropies.empty()) {
      std::sort(entropies.begin(), entropies.end());
      ins.entropy_quantiles = std::array<double, 5>{
          entropies.front(), Quantile(entropies, 0.25), Quantile(entropies, 0.5),
          Quantile(entropies, 0.75), entropies.back()};
    }
    std::size_t total_labeled = 0;
    std::size_t total_matching = 0;
    for (std::size_t c = 0; c < dump.num_classes; ++c) {
      ClassCacheStats cs;
      cs.class_id = c;
      cs.count = count[c];
      if (labeled[c] > 0) {
        cs.purity = static_cast<double>(matching[c]) / static_cast<double>(labeled[c]);
      }
      total_labeled += labeled[c];
      total_matching += matching[c];
      ins.per_class.push_back(cs);
    }
    if (total_labeled > 0) {
      ins.purity = static_cast<double>(total_matching) / static_cast<double>(total_labeled);
    }
    out.push_back(std::move(ins));
  }
  return out;
}

std::string FormatInspectionText(std::span<const CacheInspection> inspections) {
  std::ostringstream out;
  for (const CacheInspection& ins : inspections) {
    out << ins.name << " cache: " << ins.entries << " entries, shot capacity "
        << ins.shot_capacity << ", fill " << Fixed(ins.fill_ratio, "%.3f");
    if (ins.purity) out << ", label purity " << Fixed(*ins.purity, "%.4f");
    out << "\n";
    if (ins.entropy_quantiles) {
      out << "  entropy min/q25/median/q75/max:";
      for (double q : *ins.entropy_quantiles) out << " " << Fixed(q, "%.4g");
      out << "\n";
    }
    std::vector<std::size_t> histogram(ins.shot_capacity + 1, 0);
    for (const ClassCacheStats& cs : ins.per_class) {
      if (cs.count < histogram.size()) ++histogram[cs.count];
    }
    out << "  classes by fill count:";
    for (std::size_t k = 0; k < histogram.size(); ++k) out << " " << k << ":" << histogram[k];
    out << "\n";
  }
  return out.str();
}

std::string FormatInspectionCsv(std::span<const CacheInspection> inspections) {
  std::ostringstream out;
  out << "cache,class,count,purity\n";
  for (const CacheInspection& ins : inspections) {
    for (const ClassCacheStats& cs : ins.per_class) {
      out << ins.name << "," << cs.class_id << "," << cs.count << ","
          << (cs.purity ? Fixed(*cs.purity, "%.6f") : std::string()) << "\n";
    }
  }
  return out.str();
}

}  // namespace tda
