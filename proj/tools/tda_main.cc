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

// Command-line front end: run, compare, grid-search, gen-synth, inspect.
//
// Every configuration flag can also be set through an environment variable
// named TDA_<FLAG> (upper case, dashes as underscores), e.g. TDA_POS_CAPACITY.
// Precedence: command-line flag, then environment, then --config file, then
// built-in defaults.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tda/adapter.h"
#include "tda/config.h"
#include "tda/dataset.h"
#include "tda/error.h"
#include "tda/harness.h"
#include "tda/synthetic.h"

namespace {

constexpr const char* kEnvPrefix = "TDA_";

std::string EnvName(const std::string& flag) {
  std::string name = kEnvPrefix;
  for (char c : flag) name += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return name;
}

// Flags shared by run and compare: one value per TdaConfig key.
struct ConfigFlags {
  std::optional<std::string> config_path;
  tda::ConfigOverrides overrides;

  void Register(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file (flat object of config keys)")
        ->envname(EnvName("config"));
    Add(app, "pos-capacity", overrides.pos_capacity, "positive cache shot capacity k");
    Add(app, "neg-capacity", overrides.neg_capacity, "negative cache shot capacity");
    Add(app, "p-l", overrides.p_l, "negative mask probability threshold");
    Add(app, "tau-l", overrides.tau_l, "negative entropy gate lower bound");
    Add(app, "tau-h", overrides.tau_h, "negative entropy gate upper bound");
    Add(app, "pos-alpha", overrides.pos_alpha, "positive cache residual ratio");
    Add(app, "pos-beta", overrides.pos_beta, "positive cache sharpness ratio");
    Add(app, "neg-alpha", overrides.neg_alpha, "negative cache residual ratio");
    Add(app, "neg-beta", overrides.neg_beta, "negative cache sharpness ratio");
    Add(app, "logit-scale", overrides.logit_scale, "multiplier on cosine logits");
    Add(app, "update-order", overrides.update_order,
        "update_then_predict or predict_then_update");
  }

  tda::TdaConfig Load() const {
    std::optional<std::filesystem::path> path;
    if (config_path) path = *config_path;
    return tda::LoadConfig(path, overrides);
  }

 private:
  template <typename T>
  static void Add(CLI::App* app, const std::string& flag, std::optional<T>& target,
                  const std::string& help) {
    app->add_option("--" + flag, target, help)->envname(EnvName(flag));
  }
};

// Flags shared by run and compare that select the stream and its outputs.
struct StreamFlags {
  std::string dataset;
  std::optional<std::string> support;
  std::vector<std::uint64_t> shuffle_seeds;
  std::optional<std::string> output;

  void Register(CLI::App* app) {
    app->add_option("--dataset", dataset, "TDAE dataset file")
        ->required()
        ->envname(EnvName("dataset"));
    app->add_option("--support", support,
                    "TDAE file with labeled support samples for tip-adapter (default: first "
                    "pos-capacity labeled stream samples per class)");
    app->add_option("--shuffle-seed", shuffle_seeds,
                    "shuffle the stream with each seed and report mean and sd")
        ->delimiter(',');
    app->add_option("--output", output, "write the report table as CSV");
  }
};

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tda::Error(tda::ErrorKind::kIoError, "cannot write " + path);
  out << text;
  if (!out) throw tda::Error(tda::ErrorKind::kIoError, "write failed: " + path);
}

std::vector<std::optional<std::uint64_t>> SeedList(const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) return {std::nullopt};
  return {seeds.begin(), seeds.end()};
}

void PrintSeedSummary(const std::vector<tda::RunReport>& reports) {
  const tda::SeedSummary s = tda::SummarizeAccuracy(reports);
  std::printf("%-14s mean %.4f sd %.4f over %zu shuffles\n",
              std::string(tda::MethodName(reports.front().method)).c_str(), s.mean, s.stddev,
              s.runs);
}

int RunCommand(const ConfigFlags& cfg_flags, const StreamFlags& stream, const std::string& method,
               const std::optional<std::string>& dump_path,
               const std::optional<std::string>& per_class_path) {
  const tda::TdaConfig config = cfg_flags.Load();
  const tda::Method m = tda::ParseMethod(method);
  const tda::EmbeddingDataset ds = tda::ReadDataset(stream.dataset);
  std::optional<tda::EmbeddingDataset> support;
  if (stream.support) support = tda::ReadDataset(*stream.support);

  std::vector<tda::RunReport> reports;
  tda::CacheDump dump;
  for (const auto& seed : SeedList(stream.shuffle_seeds)) {
    tda::RunOptions options;
    options.shuffle_seed = seed;
    options.support = support ? &*support : nullptr;
    options.dump = reports.empty() && dump_path ? &dump : nullptr;
    reports.push_back(tda::RunStream(ds, config, m, options));
  }
  std::fputs(tda::FormatReportsText(reports).c_str(), stdout);
  if (reports.size() > 1) PrintSeedSummary(reports);
  if (stream.output) WriteText(*stream.output, tda::FormatReportsCsv(reports));
  if (per_class_path) WriteText(*per_class_path, tda::FormatPerClassCsv(reports.front()));
  if (dump_path) tda::WriteCacheDump(dump, *dump_path);
  return 0;
}

int CompareCommand(const ConfigFlags& cfg_flags, const StreamFlags& stream) {
  const tda::TdaConfig config = cfg_flags.Load();
  const tda::EmbeddingDataset ds = tda::ReadDataset(stream.dataset);
  std::optional<tda::EmbeddingDataset> support;
  if (stream.support) support = tda::ReadDataset(*stream.support);

  std::vector<tda::RunReport> all;
  std::vector<std::vector<tda::RunReport>> per_method(tda::AllMethods().size());
  for (const auto& seed : SeedList(stream.shuffle_seeds)) {
    tda::RunOptions options;
    options.shuffle_seed = seed;
    options.support = support ? &*support : nullptr;
    const std::vector<tda::RunReport> rows = tda::Compare(ds, config, options);
    for (std::size_t i = 0; i < rows.size(); ++i) per_method[i].push_back(rows[i]);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  std::fputs(tda::FormatReportsText(all).c_str(), stdout);
  if (stream.shuffle_seeds.size() > 1) {
    for (const auto& reports : per_method) PrintSeedSummary(reports);
  }
  if (stream.output) WriteText(*stream.output, tda::FormatReportsCsv(all));
  return 0;
}

struct GridFlags {
  std::string dataset;
  std::string method = "tda";
  std::optional<std::string> config_path;
  std::optional<std::string> output;
  std::size_t threads = 0;
  tda::GridSpec spec;
};

int GridCommand(GridFlags& flags) {
  std::optional<std::filesystem::path> path;
  if (flags.config_path) path = *flags.config_path;
  const tda::TdaConfig base = tda::LoadConfig(path);
  tda::GridSpec spec = flags.spec;
  const tda::GridSpec defaults = tda::GridSpec::Singleton(base, tda::ParseMethod(flags.method));
  spec.method = defaults.method;
  if (spec.pos_capacity.empty()) spec.pos_capacity = defaults.pos_capacity;
  if (spec.neg_capacity.empty()) spec.neg_capacity = defaults.neg_capacity;
  if (spec.p_l.empty()) spec.p_l = defaults.p_l;
  if (spec.tau_l.empty()) spec.tau_l = defaults.tau_l;
  if (spec.tau_h.empty()) spec.tau_h = defaults.tau_h;
  if (spec.alpha.empty()) spec.alpha = defaults.alpha;
  if (spec.beta.empty()) spec.beta = defaults.beta;

  const tda::EmbeddingDataset ds = tda::ReadDataset(flags.dataset);
  const tda::GridResult result = tda::GridSearch(ds, spec, base, flags.threads);
  const std::string csv = tda::FormatGridCsv(result);
  std::fputs(csv.c_str(), stdout);
  if (result.skipped > 0) {
    std::printf("skipped %zu combinations with tau_l >= tau_h\n", result.skipped);
  }
  if (flags.output) WriteText(*flags.output, csv);
  std::printf("best config:\n%s\n", tda::FormatConfig(result.best).c_str());
  return 0;
}

struct SynthFlags {
  tda::SynthShiftSpec spec;
  std::optional<double> zipf;
  std::string output;
};

int GenSynthCommand(SynthFlags& flags) {
  tda::SynthShiftSpec spec = flags.spec;
  if (flags.zipf) spec.prior = {tda::ClassPrior::Kind::kZipf, *flags.zipf};
  const tda::EmbeddingDataset ds = tda::GenerateSynthetic(spec);
  tda::WriteDataset(ds, flags.output);
  std::printf("wrote %zu samples (D=%zu, N=%zu) to %s\n", ds.samples.size(), ds.dim,
              ds.num_classes, flags.output.c_str());
  return 0;
}

int InspectCommand(const std::string& dump_path, const std::optional<std::string>& output) {
  const tda::CacheDump dump = tda::ReadCacheDump(dump_path);
  const std::vector<tda::CacheInspection> inspections = tda::Inspect(dump);
  std::printf("method %s, %zu classes\n", dump.method.c_str(), dump.num_classes);
  if (inspections.empty()) std::printf("run used no dynamic cache\n");
  std::fputs(tda::FormatInspectionText(inspections).c_str(), stdout);
  if (output) WriteText(*output, tda::FormatInspectionCsv(inspections));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming test-time adaptation with entropy-ranked feature caches"};
  app.require_subcommand(1);
  app.footer(std::string("Configuration flags also read environment variables with prefix ") +
             kEnvPrefix + " (e.g. TDA_POS_CAPACITY=6).");

  int status = 0;
  std::function<int()> action;

  // run
  ConfigFlags run_cfg;
  StreamFlags run_stream;
  std::string run_method = "tda";
  std::optional<std::string> dump_path;
  std::optional<std::string> per_class_path;
  CLI::App* run = app.add_subcommand("run", "Stream a dataset through one method");
  run_cfg.Register(run);
  run_stream.Register(run);
  run->add_option("--method", run_method,
                  "zero-shot, tip-adapter, tda-positive, tda-negative or tda")
      ->envname(EnvName("method"));
  run->add_option("--dump-caches", dump_path, "write final cache contents as JSON");
  run->add_option("--per-class-output", per_class_path, "write per-class accuracy as CSV");
  run->callback([&] {
    action = [&] { return RunCommand(run_cfg, run_stream, run_method, dump_path, per_class_path); };
  });

  // compare
  ConfigFlags cmp_cfg;
  StreamFlags cmp_stream;
  CLI::App* compare = app.add_subcommand("compare", "Run all five methods on the same stream");
  cmp_cfg.Register(compare);
  cmp_stream.Register(compare);
  compare->callback([&] { action = [&] { return CompareCommand(cmp_cfg, cmp_stream); }; });

  // grid-search
  GridFlags grid_flags;
  CLI::App* grid = app.add_subcommand("grid-search", "Evaluate a hyperparameter cross product");
  grid->add_option("--dataset", grid_flags.dataset, "TDAE dataset file")
      ->required()
      ->envname(EnvName("dataset"));
  grid->add_option("--method", grid_flags.method, "method evaluated at every grid point");
  grid->add_option("--config", grid_flags.config_path, "base JSON config");
  grid->add_option("--output", grid_flags.output, "write ranked results as CSV");
  grid->add_option("--threads", grid_flags.threads, "worker threads (0 = hardware)");
  grid->add_option("--max-combinations", grid_flags.spec.max_combinations,
                   "refuse grids larger than this")
      ->capture_default_str();
  grid->add_option("--pos-capacity", grid_flags.spec.pos_capacity, "values for pos_capacity")
      ->delimiter(',');
  grid->add_option("--neg-capacity", grid_flags.spec.neg_capacity, "values for neg_capacity")
      ->delimiter(',');
  grid->add_option("--p-l", grid_flags.spec.p_l, "values for p_l")->delimiter(',');
  grid->add_option("--tau-l", grid_flags.spec.tau_l, "values for tau_l")->delimiter(',');
  grid->add_option("--tau-h", grid_flags.spec.tau_h, "values for tau_h")->delimiter(',');
  grid->add_option("--alpha", grid_flags.spec.alpha, "values for alpha (both caches)")
      ->delimiter(',');
  grid->add_option("--beta", grid_flags.spec.beta, "values for beta (both caches)")
      ->delimiter(',');
  grid->callback([&] { action = [&] { return GridCommand(grid_flags); }; });

  // gen-synth
  SynthFlags synth;
  CLI::App* gen = app.add_subcommand("gen-synth", "Write a synthetic shifted dataset");
  gen->add_option("--output", synth.output, "TDAE file to write")->required();
  gen->add_option("--dim", synth.spec.dim, "embedding dimension D")->capture_default_str();
  gen->add_option("--classes", synth.spec.num_classes, "number of classes N")
      ->capture_default_str();
  gen->add_option("--samples-per-class", synth.spec.samples_per_class,
                  "samples per class (mean count under a zipf prior)")
      ->capture_default_str();
  gen->add_option("--prototype-seed", synth.spec.prototype_seed, "seed for prototypes and shift")
      ->capture_default_str();
  gen->add_option("--stream-seed", synth.spec.stream_seed, "seed for order and noise")
      ->capture_default_str();
  gen->add_option("--shift-angle", synth.spec.shift_angle, "rotation in radians, [0, pi/2]")
      ->capture_default_str();
  gen->add_option("--noise-sigma", synth.spec.noise_sigma, "per-coordinate noise sd")
      ->capture_default_str();
  gen->add_option("--zipf", synth.zipf, "use a zipf class prior with this exponent");
  gen->callback([&] { action = [&] { return GenSynthCommand(synth); }; });

  // inspect
  std::string inspect_dump;
  std::optional<std::string> inspect_output;
  CLI::App* inspect = app.add_subcommand("inspect", "Summarize a cache dump from run");
  inspect->add_option("dump", inspect_dump, "JSON written by run --dump-caches")->required();
  inspect->add_option("--output", inspect_output, "write per-class stats as CSV");
  inspect->callback([&] { action = [&] { return InspectCommand(inspect_dump, inspect_output); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "error: %s: %s\nRun with --help for more information.\n",
                 e.get_name().c_str(), e.what());
    return 2;
  }
  try {
    status = action();
  } catch (const tda::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: InternalError: %s\n", e.what());
    return 1;
  }
  return status;
}
