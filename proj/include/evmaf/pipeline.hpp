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

// Subcommand implementations behind the evmaf tool: extract, train, predict,
// evaluate and compare-pairs. Every function is a pure function of its
// inputs, the configuration and the pool/extractor versions.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "evmaf/evaluation.hpp"
#include "evmaf/fusion.hpp"
#include "evmaf/manifest.hpp"

namespace evmaf {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitPartialData = 2,
  kExitNumerical = 3,
};

// Maps an exception from the library to the tool's exit-code contract.
int exit_code_for(const std::exception& e);

struct TrainConfig {
  std::optional<double> alpha = kDefaultAlphaValue;  // nullopt: tune
  std::vector<double> alpha_grid = {0.1, 0.2, 0.3, 0.5, 0.7, 1.0};
  std::optional<double> beta;  // nullopt: tune
  double beta_grid_step = 0.05;
  SvrHyper svr;
  int selection_folds = 0;
  std::uint64_t seed = 0;
  int threads = 1;

  static constexpr double kDefaultAlphaValue = 0.3;

  static TrainConfig from_json(const nlohmann::json& j);
  static TrainConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;  // canonical, defaults filled in
  std::string hash() const;

  // Alpha used for extraction when the config asks for tuning.
  double extraction_alpha() const { return alpha.value_or(kDefaultAlphaValue); }
};

// ---------------------------------------------------------------------------
// extract

struct ExtractSummary {
  int sequences = 0;
  int from_cache = 0;
  int computed = 0;
  int failed = 0;
  long long frames_computed = 0;
  long long rows = 0;  // frames now present in the cache for this manifest
  std::vector<std::string> errors;
};

ExtractSummary cmd_extract(const DatabaseManifest& manifest,
                           const PoolSpec& pool,
                           const std::filesystem::path& cache_dir, double alpha,
                           int threads = 1);

// Per-frame features of one sequence straight from media.
std::vector<FeatureVector> extract_sequence(const DatabaseManifest& manifest,
                                            const SequenceRecord& seq,
                                            const PoolSpec& pool, double alpha);

// Loads a valid cache for every MOS-bearing sequence and aggregates it.
// Missing or stale caches raise InputError naming the extract subcommand.
TrainingTable load_training_table(const DatabaseManifest& manifest,
                                  const PoolSpec& pool,
                                  const std::filesystem::path& cache_dir,
                                  double alpha);

// ---------------------------------------------------------------------------
// train

struct TrainResult {
  FusionModel model;
  SfmsResult selection1;
  SfmsResult selection2;
  std::vector<std::pair<double, double>> alpha_scores;  // when tuned
};

TrainResult cmd_train(const DatabaseManifest& manifest1,
                      const DatabaseManifest& manifest2, const PoolSpec& pool,
                      const std::filesystem::path& cache_dir,
                      const TrainConfig& config);

// Mean E-ADM of a sequence for several alpha values (flow shared).
std::vector<double> sequence_eadm(const DatabaseManifest& manifest,
                                  const SequenceRecord& seq,
                                  const std::vector<double>& alphas);

// ---------------------------------------------------------------------------
// predict

struct PredictRequest {
  std::filesystem::path ref;
  std::filesystem::path test;
  VideoSpec spec;                                  // reference geometry
  std::optional<std::pair<int, int>> test_size;    // stored test geometry
};

struct PredictResult {
  std::vector<double> m1;
  std::vector<double> m2;
  std::vector<double> q;
  double sequence_score = 0.0;
  std::string csv;
  std::string summary;
};

PredictResult cmd_predict(const FusionModel& model, const PredictRequest& req);

// ---------------------------------------------------------------------------
// evaluate

inline constexpr const char* kModelMetric = "model";

struct DatabaseEval {
  std::string database;
  bool refused = false;
  std::string reason;
  std::vector<std::string> sequences;
  std::vector<double> mos;
  std::vector<std::vector<double>> scores;  // [metric][sequence]
  std::vector<double> srocc;                // per metric
  std::vector<int> verdict;                 // per metric, vs anchor
};

struct EvalReport {
  std::string config_hash;
  std::string anchor;
  std::vector<std::string> metrics;  // "model" first
  std::vector<DatabaseEval> databases;
  std::vector<double> overall;       // Fisher aggregate per metric
  PairwiseComparison pairwise;       // model (a) vs anchor (b)
  std::vector<PairDiff> model_pairs;
  std::vector<PairDiff> anchor_pairs;

  int refused_count() const;
  std::string render_table() const;
  std::string render_csv() const;
};

struct EvaluateRequest {
  std::vector<DatabaseManifest> manifests;
  std::vector<std::string> baselines;  // cache feature keys
  std::string anchor = kModelMetric;
  std::filesystem::path cache_dir;
};

EvalReport cmd_evaluate(const FusionModel& model, const PoolSpec& pool,
                        const EvaluateRequest& req);

// Writes report.txt, report.csv and pairs_<metric>.csv into `dir`.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// compare-pairs

std::string render_pairs_csv(const std::vector<PairDiff>& pairs,
                             const std::string& header_comment);
std::vector<PairDiff> read_pairs_csv(const std::filesystem::path& path);

struct ComparePairsResult {
  PairwiseComparison comparison;
  std::string summary;
};

ComparePairsResult cmd_compare_pairs(const std::filesystem::path& a,
                                     const std::filesystem::path& b);

}  // namespace evmaf
