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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "evmaf/cache.hpp"
#include "evmaf/error.hpp"
#include "evmaf/pipeline.hpp"
#include "support/synthetic_db.hpp"

namespace evmaf {
namespace {

namespace fs = std::filesystem;

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("evmaf_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Writes caches whose per-frame values come from `value(seq_index, key)`,
// bypassing extraction. Keys stay valid because they hash the real media.
void fabricate_caches(const DatabaseManifest& m, const PoolSpec& pool,
                      const fs::path& cache_dir, double alpha,
                      const std::function<double(std::size_t, const FeatureKey&)>& value) {
  for (std::size_t i = 0; i < m.sequences.size(); ++i) {
    const auto& seq = m.sequences[i];
    CachedSequence c;
    c.key = cache_key(pool, alpha, m, seq);
    c.pool_version = pool.version;
    c.extractor_version = kExtractorVersion;
    c.alpha = alpha;
    c.keys = pool.keys;
    for (int f = 0; f < m.source_of(seq).spec.frame_count; ++f) {
      FeatureVector v;
      v.frame_index = f;
      v.keys = pool.keys;
      for (const auto& k : pool.keys) v.values.push_back(value(i, k));
      c.frames.push_back(std::move(v));
    }
    write_cache(cache_path(cache_dir, m.database, seq.id), c);
  }
}

synth::SyntheticDbOptions tiny(std::vector<int> sources) {
  synth::SyntheticDbOptions o;
  o.width = 64;
  o.height = 64;
  o.frames = 2;
  o.sources = std::move(sources);
  o.degradations = {synth::Degradation::kBlur};
  return o;
}

PoolSpec small_pool() {
  PoolSpec p;
  p.keys = vmaf_seed_keys();
  for (const char* k : {"PSNR-Cb-S2", "SSIM-Y-S1", "SI-Y-S1", "CF-Cr-S2"}) {
    p.keys.push_back(FeatureKey::parse(k));
  }
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EVMAF_CLI_PATH) + " -q " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------
// config

TEST(TrainConfig, DefaultsAndTuneStrings) {
  const auto c = TrainConfig::from_json(nlohmann::json::parse(
      R"({"alpha": "tune", "beta": 0.5, "svr": {"nu": 0.5}})"));
  EXPECT_FALSE(c.alpha.has_value());
  ASSERT_TRUE(c.beta.has_value());
  EXPECT_EQ(*c.beta, 0.5);
  EXPECT_EQ(c.svr.nu, 0.5);
  EXPECT_EQ(c.svr.C, 4.0);
  EXPECT_EQ(c.extraction_alpha(), TrainConfig::kDefaultAlphaValue);
  const auto round = TrainConfig::from_json(c.to_json());
  EXPECT_EQ(round.hash(), c.hash());
}

TEST(TrainConfig, RejectsUnknownAndInvalid) {
  EXPECT_THROW(TrainConfig::from_json(nlohmann::json::parse(R"({"alhpa": 0.3})")),
               ConfigurationError);
  EXPECT_THROW(TrainConfig::from_json(nlohmann::json::parse(R"({"beta": "auto"})")),
               ConfigurationError);
  EXPECT_THROW(TrainConfig::from_json(nlohmann::json::parse(R"({"beta": 1.5})")),
               ConfigurationError);
  EXPECT_THROW(TrainConfig::from_json(nlohmann::json::parse(R"({"selection_folds": 1})")),
               ConfigurationError);
}

TEST(TrainConfig, HashIgnoresThreadsOnly) {
  TrainConfig a;
  TrainConfig b;
  b.threads = 4;
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 7;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ConfigurationError("x")), kExitUsage);
  EXPECT_EQ(exit_code_for(MalformedInputError("x")), kExitPartialData);
  EXPECT_EQ(exit_code_for(InputError("x")), kExitPartialData);
  EXPECT_EQ(exit_code_for(TrainingError("x")), kExitNumerical);
  EXPECT_EQ(exit_code_for(ComputationError("x")), kExitNumerical);
}

// ---------------------------------------------------------------------------
// extract

class ExtractTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = scratch("extract");
    auto o = tiny({0});
    o.hidden_reference = false;
    o.degradations = {synth::Degradation::kNoise};
    manifest_ = synth::write_synthetic_database(dir_, "two", o);
    // keep two sequences
    manifest_.sequences.resize(2);
    manifest_.save(dir_ / "two" / "manifest.json");
    manifest_ = DatabaseManifest::load(dir_ / "two" / "manifest.json");
    pool_ = small_pool();
  }
  fs::path dir_;
  DatabaseManifest manifest_;
  PoolSpec pool_;
};

TEST_F(ExtractTest, RowsEqualFrameCountSum) {
  const auto s = cmd_extract(manifest_, pool_, dir_ / "cache", 0.3);
  EXPECT_EQ(s.sequences, 2);
  EXPECT_EQ(s.computed, 2);
  EXPECT_EQ(s.failed, 0);
  EXPECT_EQ(s.rows, 4);
  const auto c = read_cache(cache_path(dir_ / "cache", "two", manifest_.sequences[0].id));
  EXPECT_EQ(c.frames.size(), 2u);
  EXPECT_EQ(c.keys, pool_.keys);
}

TEST_F(ExtractTest, SecondRunRecomputesNothing) {
  cmd_extract(manifest_, pool_, dir_ / "cache", 0.3);
  const auto before = read_text(cache_path(dir_ / "cache", "two", manifest_.sequences[1].id));
  const auto s = cmd_extract(manifest_, pool_, dir_ / "cache", 0.3);
  EXPECT_EQ(s.frames_computed, 0);
  EXPECT_EQ(s.from_cache, 2);
  EXPECT_EQ(s.rows, 4);
  EXPECT_EQ(read_text(cache_path(dir_ / "cache", "two", manifest_.sequences[1].id)), before);
}

TEST_F(ExtractTest, ChangedAlphaInvalidates) {
  cmd_extract(manifest_, pool_, dir_ / "cache", 0.3);
  const auto s = cmd_extract(manifest_, pool_, dir_ / "cache", 0.5);
  EXPECT_EQ(s.computed, 2);
}

TEST_F(ExtractTest, ThreadCountDoesNotChangeCache) {
  cmd_extract(manifest_, pool_, dir_ / "c1", 0.3, 1);
  cmd_extract(manifest_, pool_, dir_ / "c2", 0.3, 2);
  for (const auto& seq : manifest_.sequences) {
    EXPECT_EQ(read_text(cache_path(dir_ / "c1", "two", seq.id)),
              read_text(cache_path(dir_ / "c2", "two", seq.id)));
  }
}

TEST_F(ExtractTest, CorruptedFileIsPartialFailure) {
  fs::resize_file(manifest_.sequences[0].path, 100);
  const auto s = cmd_extract(manifest_, pool_, dir_ / "cache", 0.3);
  EXPECT_EQ(s.failed, 1);
  EXPECT_EQ(s.computed, 1);
  ASSERT_EQ(s.errors.size(), 1u);
  EXPECT_NE(s.errors[0].find(manifest_.sequences[0].id), std::string::npos);
  EXPECT_TRUE(fs::exists(cache_path(dir_ / "cache", "two", manifest_.sequences[1].id)));

  fs::remove_all(dir_ / "cache");
  pool_.save(dir_ / "pool.txt");
  const std::string args = "extract " + (dir_ / "two" / "manifest.json").string() +
                           " --pool " + (dir_ / "pool.txt").string() +
                           " --cache-dir " + (dir_ / "cache").string();
  EXPECT_EQ(run_cli(args), kExitPartialData);
  EXPECT_TRUE(fs::exists(cache_path(dir_ / "cache", "two", manifest_.sequences[1].id)));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli(""), kExitUsage);
  EXPECT_EQ(run_cli("train"), kExitUsage);
  EXPECT_EQ(run_cli("extract /nonexistent/manifest.json"), kExitUsage);
}

// ---------------------------------------------------------------------------
// train on fabricated caches

class PlantedTrainTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = scratch("planted");
    pool_ = small_pool();
    m1_ = synth::write_synthetic_database(dir_, "p1", tiny({0, 1, 2}));
    m2_ = synth::write_synthetic_database(dir_, "p2", tiny({3, 4, 5}));
    const FeatureKey planted = FeatureKey::parse("PSNR-Cb-S2");
    for (const auto* m : {&m1_, &m2_}) {
      std::mt19937_64 rng(m == &m1_ ? 11 : 22);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::map<std::pair<std::size_t, std::string>, double> table;
      for (std::size_t i = 0; i < m->sequences.size(); ++i) {
        for (const auto& k : pool_.keys) {
          table[{i, k.to_string()}] =
              k == planted ? 20.0 + 0.3 * *m->sequences[i].mos : u(rng);
        }
      }
      fabricate_caches(*m, pool_, dir_ / "cache", 0.3,
                       [&](std::size_t i, const FeatureKey& k) {
                         return table.at({i, k.to_string()});
                       });
    }
  }
  fs::path dir_;
  PoolSpec pool_;
  DatabaseManifest m1_;
  DatabaseManifest m2_;
};

TEST_F(PlantedTrainTest, SelectsPlantedFeature) {
  TrainConfig c;
  c.beta = 0.5;
  const auto r = cmd_train(m1_, m2_, pool_, dir_ / "cache", c);
  const FeatureKey planted = FeatureKey::parse("PSNR-Cb-S2");
  ASSERT_FALSE(r.model.model2.keys.empty());
  EXPECT_EQ(r.model.model2.keys.front(), planted);
  const auto& k1 = r.model.model1.keys;
  EXPECT_NE(std::find(k1.begin(), k1.end(), planted), k1.end());
  for (const auto& s : vmaf_seed_keys()) {
    EXPECT_NE(std::find(k1.begin(), k1.end(), s), k1.end()) << s.to_string();
  }
}

TEST_F(PlantedTrainTest, PinnedBetaRecorded) {
  TrainConfig c;
  c.beta = 0.5;
  const auto r = cmd_train(m1_, m2_, pool_, dir_ / "cache", c);
  EXPECT_EQ(r.model.beta, 0.5);
  r.model.save(dir_ / "model.json");
  EXPECT_EQ(FusionModel::load(dir_ / "model.json").beta, 0.5);
  EXPECT_EQ(r.model.config_hash, c.hash());
}

TEST_F(PlantedTrainTest, RerunIsBitIdentical) {
  TrainConfig c;
  c.selection_folds = 3;
  c.seed = 5;
  const auto a = cmd_train(m1_, m2_, pool_, dir_ / "cache", c).model.serialize();
  const auto b = cmd_train(m1_, m2_, pool_, dir_ / "cache", c).model.serialize();
  EXPECT_EQ(a, b);
}

TEST_F(PlantedTrainTest, TunedBetaOnGrid) {
  TrainConfig c;
  c.beta_grid_step = 0.25;
  const auto r = cmd_train(m1_, m2_, pool_, dir_ / "cache", c);
  const double scaled = r.model.beta / 0.25;
  EXPECT_NEAR(scaled, std::round(scaled), 1e-12);
}

TEST_F(PlantedTrainTest, MissingCacheNamesExtract) {
  fs::remove(cache_path(dir_ / "cache", "p2", m2_.sequences[3].id));
  try {
    cmd_train(m1_, m2_, pool_, dir_ / "cache", TrainConfig{});
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("evmaf extract"), std::string::npos) << what;
    EXPECT_NE(what.find(m2_.sequences[3].id), std::string::npos) << what;
  }
}

TEST_F(PlantedTrainTest, StaleAlphaIsReported) {
  TrainConfig c;
  c.alpha = 0.7;
  try {
    cmd_train(m1_, m2_, pool_, dir_ / "cache", c);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos) << e.what();
  }
}

// ---------------------------------------------------------------------------
// evaluate on fabricated caches

class EvaluateTest : public PlantedTrainTest {
 protected:
  void SetUp() override {
    PlantedTrainTest::SetUp();
    TrainConfig c;
    c.beta = 0.5;
    model_ = cmd_train(m1_, m2_, pool_, dir_ / "cache", c).model;
    // two held-out databases: SI tracks MOS with small noise, CF is random
    for (int d = 0; d < 2; ++d) {
      auto m = synth::write_synthetic_database(dir_, "e" + std::to_string(d),
                                               tiny({6 + 2 * d, 7 + 2 * d}));
      std::mt19937_64 rng(100 + d);
      std::normal_distribution<double> noise(0.0, 0.5);
      std::uniform_real_distribution<double> u(0.0, 100.0);
      std::map<std::pair<std::size_t, std::string>, double> table;
      for (std::size_t i = 0; i < m.sequences.size(); ++i) {
        const double mos = *m.sequences[i].mos;
        for (const auto& k : pool_.keys) {
          double v = u(rng);
          if (k.to_string() == "SI-Y-S1") v = mos + noise(rng);
          if (k.to_string() == "PSNR-Cb-S2") v = 20.0 + 0.3 * mos;
          table[{i, k.to_string()}] = v;
        }
      }
      fabricate_caches(m, pool_, dir_ / "cache", model_.alpha,
                       [&](std::size_t i, const FeatureKey& k) {
                         return table.at({i, k.to_string()});
                       });
      tests_.push_back(m);
    }
  }
  FusionModel model_;
  std::vector<DatabaseManifest> tests_;
};

TEST_F(EvaluateTest, SelfAnchorVerdictsAreZero) {
  EvaluateRequest req;
  req.manifests = tests_;
  req.baselines = {"CF-Cr-S2"};
  req.cache_dir = dir_ / "cache";
  const auto rep = cmd_evaluate(model_, pool_, req);
  for (const auto& d : rep.databases) EXPECT_EQ(d.verdict[0], 0);
  req.anchor = "CF-Cr-S2";
  const auto rep2 = cmd_evaluate(model_, pool_, req);
  for (const auto& d : rep2.databases) EXPECT_EQ(d.verdict[1], 0);
}

TEST_F(EvaluateTest, OverallIsFisherOfRow) {
  EvaluateRequest req;
  req.manifests = tests_;
  req.baselines = {"SI-Y-S1", "CF-Cr-S2"};
  req.cache_dir = dir_ / "cache";
  const auto rep = cmd_evaluate(model_, pool_, req);
  ASSERT_EQ(rep.metrics.size(), 3u);
  for (std::size_t k = 0; k < rep.metrics.size(); ++k) {
    std::vector<double> row;
    for (const auto& d : rep.databases) row.push_back(d.srocc[k]);
    EXPECT_EQ(rep.overall[k], fisher_aggregate(row));
  }
}

TEST_F(EvaluateTest, NearMosMetricWinsAgainstRandomAnchor) {
  EvaluateRequest req;
  req.manifests = tests_;
  req.baselines = {"SI-Y-S1", "CF-Cr-S2"};
  req.anchor = "CF-Cr-S2";
  req.cache_dir = dir_ / "cache";
  const auto rep = cmd_evaluate(model_, pool_, req);
  for (const auto& d : rep.databases) {
    EXPECT_EQ(d.verdict[1], 1) << d.database;
    EXPECT_GT(d.srocc[1], 0.95);
  }
}

TEST_F(EvaluateTest, ManifestWithoutMosIsRefused) {
  auto no_mos = tests_[0];
  no_mos.database = "nomos";
  for (auto& s : no_mos.sequences) s.mos.reset();
  EvaluateRequest req;
  req.manifests = {tests_[0], no_mos};
  req.cache_dir = dir_ / "cache";
  const auto rep = cmd_evaluate(model_, pool_, req);
  EXPECT_EQ(rep.refused_count(), 1);
  EXPECT_TRUE(rep.databases[1].refused);
  EXPECT_EQ(rep.overall[0], fisher_aggregate(std::vector<double>{rep.databases[0].srocc[0]}));
  EXPECT_NE(rep.render_table().find("refused nomos"), std::string::npos);
}

TEST_F(EvaluateTest, ReportsAreDeterministicAndPairsRoundTrip) {
  EvaluateRequest req;
  req.manifests = tests_;
  req.baselines = {"SI-Y-S1"};
  req.anchor = "SI-Y-S1";
  req.cache_dir = dir_ / "cache";
  write_report(cmd_evaluate(model_, pool_, req), dir_ / "r1");
  write_report(cmd_evaluate(model_, pool_, req), dir_ / "r2");
  for (const char* f : {"report.txt", "report.csv", "pairs_model.csv", "pairs_SI-Y-S1.csv"}) {
    ASSERT_TRUE(fs::exists(dir_ / "r1" / f)) << f;
    EXPECT_EQ(read_text(dir_ / "r1" / f), read_text(dir_ / "r2" / f)) << f;
  }
  const auto rep = cmd_evaluate(model_, pool_, req);
  const auto back = read_pairs_csv(dir_ / "r1" / "pairs_model.csv");
  ASSERT_EQ(back.size(), rep.model_pairs.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].mos_diff, rep.model_pairs[i].mos_diff);
    EXPECT_EQ(back[i].metric_diff, rep.model_pairs[i].metric_diff);
  }
  const auto cmp = cmd_compare_pairs(dir_ / "r1" / "pairs_model.csv",
                                     dir_ / "r1" / "pairs_SI-Y-S1.csv");
  EXPECT_EQ(cmp.comparison.table, rep.pairwise.table);
  EXPECT_EQ(cmp.comparison.p_value, rep.pairwise.p_value);
}

TEST(ComparePairs, RejectsMissingColumns) {
  const fs::path dir = scratch("pairs");
  std::ofstream(dir / "bad.csv") << "a,b\n1,2\n";
  EXPECT_THROW(read_pairs_csv(dir / "bad.csv"), MalformedInputError);
}

// ---------------------------------------------------------------------------
// end to end on real extraction, small geometry

class RealPipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(scratch("real"));
    auto o = synth::SyntheticDbOptions{};
    // MS-SSIM at S4 needs 256 luma lines, the smallest geometry the full
    // pool accepts
    o.width = 256;
    o.height = 256;
    o.frames = 2;
    o.sources = {0};
    m1_ = new DatabaseManifest(synth::write_synthetic_database(*dir_, "r1", o));
    o.sources = {1};
    m2_ = new DatabaseManifest(synth::write_synthetic_database(*dir_, "r2", o));
    for (const auto* m : {m1_, m2_}) {
      cmd_extract(*m, full_pool_spec(), *dir_ / "cache", TrainConfig::kDefaultAlphaValue);
    }
    TrainConfig c;
    c.beta = 0.5;
    model_ = new FusionModel(cmd_train(*m1_, *m2_, full_pool_spec(), *dir_ / "cache", c).model);
  }
  static void TearDownTestSuite() {
    delete dir_;
    delete m1_;
    delete m2_;
    delete model_;
  }
  static PredictRequest identity_request() {
    const auto& src = m2_->sources.front();
    PredictRequest r;
    r.ref = src.path;
    r.test = src.path;
    r.spec = src.spec;
    return r;
  }
  static fs::path* dir_;
  static DatabaseManifest* m1_;
  static DatabaseManifest* m2_;
  static FusionModel* model_;
};

fs::path* RealPipelineTest::dir_ = nullptr;
DatabaseManifest* RealPipelineTest::m1_ = nullptr;
DatabaseManifest* RealPipelineTest::m2_ = nullptr;
FusionModel* RealPipelineTest::model_ = nullptr;

TEST_F(RealPipelineTest, IdentityScoresHigh) {
  const auto r = cmd_predict(*model_, identity_request());
  EXPECT_GE(r.sequence_score, 95.0);
  for (double q : r.q) {
    EXPECT_GE(q, 0.0);
    EXPECT_LE(q, 100.0);
  }
}

TEST_F(RealPipelineTest, CsvRowsMatchFramesAndRepeat) {
  const auto a = cmd_predict(*model_, identity_request());
  const auto b = cmd_predict(*model_, identity_request());
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.summary, b.summary);
  int rows = 0;
  std::istringstream in(a.csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line.rfind("frame,", 0) != 0) ++rows;
  }
  EXPECT_EQ(rows, identity_request().spec.frame_count);
  EXPECT_NE(a.csv.find(model_->config_hash), std::string::npos);
}

TEST_F(RealPipelineTest, PredictMatchesCachedFeatures) {
  // the per-frame path through the extractor agrees with the cache path
  const auto& seq = m2_->sequences[3];
  ASSERT_FALSE(seq.resample.has_value());
  PredictRequest r;
  r.ref = m2_->source_of(seq).path;
  r.test = seq.path;
  r.spec = m2_->source_of(seq).spec;
  const auto pred = cmd_predict(*model_, r);
  const auto cached = read_cache(cache_path(*dir_ / "cache", "r2", seq.id));
  for (std::size_t f = 0; f < cached.frames.size(); ++f) {
    EXPECT_NEAR(pred.q[f], model_->predict(cached.frames[f]), 1e-5);
  }
}

TEST_F(RealPipelineTest, ResampledTestIsUpsampled) {
  const auto& seq = *std::find_if(
      m2_->sequences.begin(), m2_->sequences.end(),
      [](const SequenceRecord& s) { return s.id == "src1_resample1"; });
  ASSERT_TRUE(seq.resample.has_value());
  PredictRequest r;
  r.ref = m2_->source_of(seq).path;
  r.test = seq.path;
  r.spec = m2_->source_of(seq).spec;
  r.test_size = seq.resample;
  const auto pred = cmd_predict(*model_, r);
  const auto cached = read_cache(cache_path(*dir_ / "cache", "r2", seq.id));
  for (std::size_t f = 0; f < cached.frames.size(); ++f) {
    EXPECT_NEAR(pred.q[f], model_->predict(cached.frames[f]), 1e-5);
  }
  r.test_size.reset();
  EXPECT_THROW(cmd_predict(*model_, r), MalformedInputError);
}

TEST_F(RealPipelineTest, DegradationLowersScore) {
  const auto& seq = *std::find_if(
      m2_->sequences.begin(), m2_->sequences.end(),
      [](const SequenceRecord& s) { return s.id == "src1_noise3"; });
  PredictRequest r;
  r.ref = m2_->source_of(seq).path;
  r.test = seq.path;
  r.spec = m2_->source_of(seq).spec;
  EXPECT_LT(cmd_predict(*model_, r).sequence_score,
            cmd_predict(*model_, identity_request()).sequence_score);
}

TEST_F(RealPipelineTest, VersionMismatchRefused) {
  auto j = model_->to_json();
  j["schema_version"] = 99;
  try {
    FusionModel::from_json(j);
    FAIL() << "expected VersionError";
  } catch (const VersionError& e) {
    EXPECT_NE(std::string(e.what()).find("99"), std::string::npos);
  }
}

TEST_F(RealPipelineTest, CliPredictMatchesLibrary) {
  model_->save(*dir_ / "model.json");
  const auto req = identity_request();
  const std::string args = "predict --model " + (*dir_ / "model.json").string() +
                           " --ref " + req.ref.string() + " --test " + req.test.string() +
                           " --width 256 --height 256 --frames 2 -o " +
                           (*dir_ / "pred.csv").string();
  ASSERT_EQ(run_cli(args), kExitOk);
  EXPECT_EQ(read_text(*dir_ / "pred.csv"), cmd_predict(*model_, req).csv);
}

}  // namespace
}  // namespace evmaf
