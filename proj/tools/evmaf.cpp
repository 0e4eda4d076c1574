// Copyright 2026 The evmaf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// evmaf command-line tool.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evmaf/cache.hpp"
#include "evmaf/error.hpp"
#include "evmaf/log.hpp"
#include "evmaf/pipeline.hpp"

namespace {

using evmaf::ExitCode;

evmaf::PoolSpec load_pool(const std::string& path) {
  return path.empty() ? evmaf::full_pool_spec() : evmaf::PoolSpec::load(path);
}

std::vector<evmaf::DatabaseManifest> load_manifests(
    const std::vector<std::string>& paths) {
  std::vector<evmaf::DatabaseManifest> out;
  for (const auto& p : paths) out.push_back(evmaf::DatabaseManifest::load(p));
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw evmaf::IoError("cannot write " + path);
  out << text;
  if (!out) throw evmaf::IoError("short write on " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evmaf: full-reference video quality with dynamic-texture "
               "aware detail loss and two-model fusion"};
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  std::string cache_dir = "cache";
  std::string pool_path;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  // extract
  auto* extract = app.add_subcommand("extract", "compute and cache per-frame features");
  std::vector<std::string> extract_manifests;
  std::optional<double> extract_alpha;
  extract->add_option("manifests", extract_manifests, "database manifests")
      ->required()
      ->check(CLI::ExistingFile);
  extract->add_option("--cache-dir", cache_dir, "feature cache directory");
  extract->add_option("--pool", pool_path, "pool spec file (default: built-in full pool)");
  extract->add_option("--config", config_path, "training config (for alpha)");
  extract->add_option("--alpha", extract_alpha, "E-ADM masking exponent");
  extract->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  // train
  auto* train = app.add_subcommand("train", "select features and train the fused model");
  std::string train_m1;
  std::string train_m2;
  std::string model_out = "model.json";
  train->add_option("manifest1", train_m1, "manifest for model 1")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("manifest2", train_m2, "manifest for model 2")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--cache-dir", cache_dir, "feature cache directory");
  train->add_option("--pool", pool_path, "pool spec file");
  train->add_option("--config", config_path, "training config (JSON)");
  train->add_option("--seed", seed, "fold shuffling seed (overrides config)");
  train->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  train->add_option("-o,--out", model_out, "model file to write");

  // predict
  auto* predict = app.add_subcommand("predict", "score one reference/test pair");
  std::string model_path;
  std::string ref_path;
  std::string test_path;
  evmaf::VideoSpec spec;
  std::optional<int> test_width;
  std::optional<int> test_height;
  std::string predict_out;
  predict->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
  predict->add_option("--ref", ref_path, "reference video")->required()->check(CLI::ExistingFile);
  predict->add_option("--test", test_path, "test video")->required()->check(CLI::ExistingFile);
  predict->add_option("--width", spec.width, "reference width")->required();
  predict->add_option("--height", spec.height, "reference height")->required();
  predict->add_option("--frames", spec.frame_count, "frame count")->required();
  predict->add_option("--fps", spec.fps, "frame rate");
  predict->add_option("--bit-depth", spec.bit_depth, "8 or 10");
  predict->add_option("--test-width", test_width, "stored test width (bilinear upsampling)");
  predict->add_option("--test-height", test_height, "stored test height");
  predict->add_option("-o,--out", predict_out, "per-frame CSV (default: stdout)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "benchmark the model against baselines");
  std::vector<std::string> eval_manifests;
  std::vector<std::string> baselines;
  std::string anchor = evmaf::kModelMetric;
  std::string report_dir = "report";
  evaluate->add_option("manifests", eval_manifests, "test manifests")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--cache-dir", cache_dir, "feature cache directory");
  evaluate->add_option("--pool", pool_path, "pool spec file");
  evaluate->add_option("--baseline", baselines, "baseline feature key (repeatable)");
  evaluate->add_option("--anchor", anchor, "anchor metric for F-test verdicts");
  evaluate->add_option("-o,--out", report_dir, "report directory");

  // compare-pairs
  auto* compare = app.add_subcommand("compare-pairs", "pairwise accuracy and exact test");
  std::string pairs_a;
  std::string pairs_b;
  compare->add_option("a", pairs_a, "pairs CSV of metric A")->required()->check(CLI::ExistingFile);
  compare->add_option("b", pairs_b, "pairs CSV of metric B")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? evmaf::kExitOk : evmaf::kExitUsage;
  }
  if (verbose) evmaf::set_log_level(evmaf::LogLevel::kDebug);
  if (quiet) evmaf::set_log_level(evmaf::LogLevel::kWarning);

  try {
    evmaf::TrainConfig config;
    if (!config_path.empty()) config = evmaf::TrainConfig::load(config_path);
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;

    if (*extract) {
      const double alpha = extract_alpha ? *extract_alpha : config.extraction_alpha();
      const auto pool = load_pool(pool_path);
      int failed = 0;
      for (const auto& m : load_manifests(extract_manifests)) {
        const auto s = evmaf::cmd_extract(m, pool, cache_dir, alpha, config.threads);
        failed += s.failed;
        std::printf("%s: sequences=%d cached=%d computed=%d failed=%d frames_computed=%lld rows=%lld\n",
                    m.database.c_str(), s.sequences, s.from_cache, s.computed,
                    s.failed, s.frames_computed, s.rows);
      }
      return failed > 0 ? evmaf::kExitPartialData : evmaf::kExitOk;
    }
    if (*train) {
      const auto pool = load_pool(pool_path);
      const auto m1 = evmaf::DatabaseManifest::load(train_m1);
      const auto m2 = evmaf::DatabaseManifest::load(train_m2);
      const auto r = evmaf::cmd_train(m1, m2, pool, cache_dir, config);
      r.model.save(model_out);
      std::printf("model=%s alpha=%s beta=%s m1=%zu m2=%zu config=%s\n",
                  model_out.c_str(), evmaf::format_double(r.model.alpha).c_str(),
                  evmaf::format_double(r.model.beta).c_str(),
                  r.model.model1.keys.size(), r.model.model2.keys.size(),
                  r.model.config_hash.c_str());
      return evmaf::kExitOk;
    }
    if (*predict) {
      if (test_width.has_value() != test_height.has_value()) {
        throw evmaf::ConfigurationError("--test-width and --test-height go together");
      }
      evmaf::PredictRequest req;
      req.ref = ref_path;
      req.test = test_path;
      req.spec = spec;
      if (test_width) req.test_size = std::make_pair(*test_width, *test_height);
      const auto model = evmaf::FusionModel::load(model_path);
      const auto r = evmaf::cmd_predict(model, req);
      if (predict_out.empty()) {
        std::cout << r.csv;
      } else {
        write_file(predict_out, r.csv);
      }
      std::cerr << r.summary << "\n";
      return evmaf::kExitOk;
    }
    if (*evaluate) {
      evmaf::EvaluateRequest req;
      req.manifests = load_manifests(eval_manifests);
      req.baselines = baselines;
      req.anchor = anchor;
      req.cache_dir = cache_dir;
      const auto model = evmaf::FusionModel::load(model_path);
      const auto rep = evmaf::cmd_evaluate(model, load_pool(pool_path), req);
      evmaf::write_report(rep, report_dir);
      std::cout << rep.render_table();
      return rep.refused_count() > 0 ? evmaf::kExitPartialData : evmaf::kExitOk;
    }
    if (*compare) {
      std::cout << evmaf::cmd_compare_pairs(pairs_a, pairs_b).summary << "\n";
      return evmaf::kExitOk;
    }
  } catch (const std::exception& e) {
    evmaf::log_error(e.what());
    return evmaf::exit_code_for(e);
  }
  return evmaf::kExitUsage;
}
