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

// SVR fusion: min-max normalization, nu-SVR training and prediction,
// greedy forward feature selection and the two-model combination.

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "evmaf/features.hpp"

namespace evmaf {

struct TrainingRow {
  std::string sequence_id;
  std::string content_id;  // source id; groups rows for k-fold selection
  FeatureVector features;  // sequence-level (frame-mean) values
  double mos = 0.0;        // normalized to [0, 100]
};

struct TrainingTable {
  std::string database_id;
  std::vector<TrainingRow> rows;

  std::vector<double> column(const FeatureKey& key) const;
  std::vector<double> mos() const;
};

class Normalizer {
 public:
  Normalizer() = default;
  Normalizer(std::vector<double> mins, std::vector<double> maxs);

  // Fits per-column min/max. Rows are feature vectors in column order.
  static Normalizer fit(const std::vector<std::vector<double>>& rows);

  // Maps to [0, 1]; constant columns map to 0; out-of-range values clamp.
  std::vector<double> apply(const std::vector<double>& row) const;

  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }

 private:
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

struct NormalizedTable {
  std::vector<std::vector<double>> x;  // rows x keys, in [0, 1]
  std::vector<double> y;               // MOS in [0, 100]
  Normalizer normalizer;
};

NormalizedTable normalize_features(const TrainingTable& table,
                                   const std::vector<FeatureKey>& keys);

struct SvrHyper {
  double nu = 0.9;
  double C = 4.0;
  double gamma = 0.0;  // <= 0 means 1 / number of features
  double eps = 1e-3;   // solver stopping tolerance
  long long max_iterations = 10'000'000;
};

class SvrModel {
 public:
  std::vector<FeatureKey> keys;
  Normalizer normalizer;
  double gamma = 1.0;
  double C = 4.0;
  double nu = 0.9;
  double rho = 0.0;
  std::vector<std::vector<double>> support_vectors;  // normalized
  std::vector<double> coefficients;
  long long iterations = 0;

  // Raw model output on a normalized row, in target units (MOS / 100).
  double decision(const std::vector<double>& normalized) const;

  // Prediction on the MOS scale, clipped to [0, 100].
  double predict_row(const std::vector<double>& raw) const;

  nlohmann::json to_json() const;
  static SvrModel from_json(const nlohmann::json& j);
};

SvrModel train_svr(const TrainingTable& table,
                   const std::vector<FeatureKey>& keys, const SvrHyper& hyper);

// Lower-level entry on an already normalized design matrix.
SvrModel train_svr_matrix(const std::vector<std::vector<double>>& x,
                          const std::vector<double>& mos, const SvrHyper& hyper);

double predict_svr(const SvrModel& model, const FeatureVector& features);

struct SfmsOptions {
  int folds = 0;  // 0: train and score on the whole table; k >= 2: grouped k-fold
  std::uint64_t seed = 0;  // shuffles the content-to-fold assignment
};

struct SfmsResult {
  std::vector<FeatureKey> selected;
  std::vector<double> trace;  // J after initialization and after each addition
};

// Training-set SROCC of an SVR fitted on `keys`, or the k-fold variant.
double selection_score(const TrainingTable& table,
                       const std::vector<FeatureKey>& keys,
                       const SvrHyper& hyper, const SfmsOptions& options = {});

SfmsResult sfms_select(const std::vector<FeatureKey>& pool,
                       const std::vector<FeatureKey>& seed,
                       const TrainingTable& table, const SvrHyper& hyper,
                       const SfmsOptions& options = {});

double combine_models(double m1, double m2, double beta);

struct BetaTuningSet {
  std::vector<double> m1;
  std::vector<double> m2;
  std::vector<double> mos;
};

double tune_beta(const std::vector<BetaTuningSet>& sets, double grid_step);

inline constexpr const char* kModelSchema = "evmaf-model";
inline constexpr int kModelSchemaVersion = 1;

class FusionModel {
 public:
  SvrModel model1;
  SvrModel model2;
  double beta = 0.5;
  double alpha = 0.3;
  int pool_version = kPoolSpecVersion;
  int extractor_version = kExtractorVersion;
  std::string config_hash;

  // Union of both models' keys, model1 first, duplicates removed.
  std::vector<FeatureKey> required_keys() const;

  double predict(const FeatureVector& features) const;

  nlohmann::json to_json() const;
  static FusionModel from_json(const nlohmann::json& j);
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;
  static FusionModel load(const std::filesystem::path& path);
};

}  // namespace evmaf
