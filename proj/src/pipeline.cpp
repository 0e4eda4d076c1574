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

#include "evmaf/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "evmaf/cache.hpp"
#include "evmaf/error.hpp"
#include "evmaf/log.hpp"

namespace evmaf {

using json = nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (!err) return kExitNumerical;
  switch (err->kind()) {
    case ErrorKind::kConfiguration:
    case ErrorKind::kOutOfRange:
      return kExitUsage;
    case ErrorKind::kTraining:
    case ErrorKind::kComputation:
      return kExitNumerical;
    case ErrorKind::kMalformedInput:
    case ErrorKind::kDimension:
    case ErrorKind::kInput:
    case ErrorKind::kVersion:
    case ErrorKind::kIo:
      return kExitPartialData;
  }
  return kExitNumerical;
}

// ---------------------------------------------------------------------------
// config

namespace {

std::optional<double> number_or_tune(const json& j, const char* name,
                                     std::optional<double> fallback) {
  if (!j.contains(name)) return fallback;
  const json& v = j.at(name);
  if (v.is_string()) {
    if (v.get<std::string>() == "tune") return std::nullopt;
    throw ConfigurationError(std::string("config: ") + name +
                             " must be a number or \"tune\"");
  }
  if (!v.is_number()) {
    throw ConfigurationError(std::string("config: ") + name +
                             " must be a number or \"tune\"");
  }
  return v.get<double>();
}

json number_or_tune_json(const std::optional<double>& v) {
  return v ? json(*v) : json("tune");
}

}  // namespace

TrainConfig TrainConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigurationError("config: expected a JSON object");
  static const std::set<std::string> known = {
      "alpha", "alpha_grid", "beta", "beta_grid_step", "svr",
      "selection_folds", "seed", "threads"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigurationError("config: unknown field " + k);
  }
  TrainConfig c;
  try {
    c.alpha = number_or_tune(j, "alpha", c.alpha);
    c.beta = number_or_tune(j, "beta", c.beta);
    if (j.contains("alpha_grid")) {
      c.alpha_grid = j["alpha_grid"].get<std::vector<double>>();
    }
    c.beta_grid_step = j.value("beta_grid_step", c.beta_grid_step);
    if (j.contains("svr")) {
      const json& s = j["svr"];
      c.svr.nu = s.value("nu", c.svr.nu);
      c.svr.C = s.value("C", c.svr.C);
      c.svr.gamma = s.value("gamma", c.svr.gamma);
      c.svr.eps = s.value("eps", c.svr.eps);
      c.svr.max_iterations = s.value("max_iterations", c.svr.max_iterations);
    }
    c.selection_folds = j.value("selection_folds", c.selection_folds);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
  if (c.alpha && !(*c.alpha > 0.0)) throw ConfigurationError("config: alpha must be > 0");
  if (c.beta && (*c.beta < 0.0 || *c.beta > 1.0)) {
    throw ConfigurationError("config: beta must lie in [0, 1]");
  }
  if (!c.alpha) {
    if (c.alpha_grid.empty()) throw ConfigurationError("config: empty alpha_grid");
    for (double a : c.alpha_grid) {
      if (!(a > 0.0)) throw ConfigurationError("config: alpha_grid values must be > 0");
    }
  }
  if (!(c.beta_grid_step > 0.0 && c.beta_grid_step <= 1.0)) {
    throw ConfigurationError("config: beta_grid_step must lie in (0, 1]");
  }
  if (!(c.svr.nu > 0.0 && c.svr.nu <= 1.0) || !(c.svr.C > 0.0) ||
      !(c.svr.eps > 0.0)) {
    throw ConfigurationError("config: svr needs nu in (0, 1], C > 0, eps > 0");
  }
  if (c.selection_folds == 1 || c.selection_folds < 0) {
    throw ConfigurationError("config: selection_folds must be 0 or >= 2");
  }
  if (c.threads < 1) throw ConfigurationError("config: threads must be >= 1");
  return c;
}

TrainConfig TrainConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config " + path.string() + ": " + e.what());
  }
}

json TrainConfig::to_json() const {
  json j;
  j["alpha"] = number_or_tune_json(alpha);
  j["alpha_grid"] = alpha_grid;
  j["beta"] = number_or_tune_json(beta);
  j["beta_grid_step"] = beta_grid_step;
  j["svr"] = {{"nu", svr.nu},
              {"C", svr.C},
              {"gamma", svr.gamma},
              {"eps", svr.eps},
              {"max_iterations", svr.max_iterations}};
  j["selection_folds"] = selection_folds;
  j["seed"] = seed;
  j["threads"] = threads;
  return j;
}

std::string TrainConfig::hash() const {
  // threads never changes results, so it stays out of the hash
  json j = to_json();
  j.erase("threads");
  Fnv1a h;
  h.add(j.dump());
  h.add("|pool=" + std::to_string(kPoolSpecVersion));
  h.add("|extractor=" + std::to_string(kExtractorVersion));
  return h.hex();
}

// ---------------------------------------------------------------------------
// extract

std::vector<FeatureVector> extract_sequence(const DatabaseManifest& manifest,
                                            const SequenceRecord& seq,
                                            const PoolSpec& pool, double alpha) {
  const SourceRecord& src = manifest.source_of(seq);
  auto ref = SequenceReader::open(src.path, src.spec);
  auto test = SequenceReader::open(seq.path, manifest.test_spec(seq));
  const ResampleRule rule =
      seq.resample ? ResampleRule::kBilinear : ResampleRule::kNone;
  FeatureExtractor extractor(pool, ExtractOptions{alpha});
  std::vector<FeatureVector> frames;
  for (int i = 0; i < src.spec.frame_count; ++i) {
    frames.push_back(extractor.push(read_frame_pair(ref, test, i, rule)));
  }
  return frames;
}

ExtractSummary cmd_extract(const DatabaseManifest& manifest,
                           const PoolSpec& pool, const fs::path& cache_dir,
                           double alpha, int threads) {
  const std::size_t n = manifest.sequences.size();
  enum class Outcome { kCached, kComputed, kFailed };
  std::vector<Outcome> outcome(n, Outcome::kFailed);
  std::vector<long long> frames(n, 0);
  std::vector<std::string> errors(n);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const SequenceRecord& seq = manifest.sequences[i];
      try {
        const std::string key = cache_key(pool, alpha, manifest, seq);
        const fs::path path = cache_path(cache_dir, manifest.database, seq.id);
        if (auto hit = read_cache_if_valid(path, key)) {
          frames[i] = static_cast<long long>(hit->frames.size());
          outcome[i] = Outcome::kCached;
          continue;
        }
        CachedSequence c;
        c.key = key;
        c.pool_version = pool.version;
        c.extractor_version = kExtractorVersion;
        c.alpha = alpha;
        c.keys = pool.keys;
        c.frames = extract_sequence(manifest, seq, pool, alpha);
        write_cache(path, c);
        frames[i] = static_cast<long long>(c.frames.size());
        outcome[i] = Outcome::kComputed;
      } catch (const std::exception& e) {
        errors[i] = manifest.database + "/" + seq.id + ": " + e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::vector<std::thread> pool_threads;
  for (int t = 1; t < workers; ++t) pool_threads.emplace_back(work);
  work();
  for (auto& t : pool_threads) t.join();

  ExtractSummary s;
  s.sequences = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (outcome[i]) {
      case Outcome::kCached:
        ++s.from_cache;
        s.rows += frames[i];
        break;
      case Outcome::kComputed:
        ++s.computed;
        s.rows += frames[i];
        s.frames_computed += frames[i];
        break;
      case Outcome::kFailed:
        ++s.failed;
        s.errors.push_back(errors[i]);
        log_error(errors[i]);
        break;
    }
  }
  std::ostringstream msg;
  msg << "extract " << manifest.database << ": " << s.sequences
      << " sequences, " << s.from_cache << " from cache, " << s.computed
      << " computed, " << s.failed << " failed, frames_computed="
      << s.frames_computed << " rows=" << s.rows;
  log_info(msg.str());
  return s;
}

namespace {

std::string extract_hint(const DatabaseManifest& manifest,
                         const fs::path& cache_dir) {
  const std::string m =
      manifest.origin.empty() ? "<manifest>" : manifest.origin.string();
  return "run `evmaf extract " + m + " --cache-dir " + cache_dir.string() +
         "` first";
}

CachedSequence require_cache(const DatabaseManifest& manifest,
                             const SequenceRecord& seq, const PoolSpec& pool,
                             const fs::path& cache_dir, double alpha) {
  const fs::path path = cache_path(cache_dir, manifest.database, seq.id);
  if (!fs::exists(path)) {
    throw InputError("no feature cache for " + manifest.database + "/" +
                     seq.id + " in " + cache_dir.string() + "; " +
                     extract_hint(manifest, cache_dir));
  }
  const std::string key = cache_key(pool, alpha, manifest, seq);
  if (auto hit = read_cache_if_valid(path, key)) return *hit;
  std::string detail = "stale";
  try {
    const CachedSequence old = read_cache(path);
    if (old.alpha != alpha) {
      detail = "stale (cache alpha " + format_double(old.alpha) +
               ", requested " + format_double(alpha) + ")";
    } else if (old.pool_version != pool.version ||
               old.extractor_version != kExtractorVersion) {
      detail = "stale (pool/extractor version differs)";
    }
  } catch (const Error&) {
    detail = "unreadable";
  }
  throw InputError("feature cache for " + manifest.database + "/" + seq.id +
                   " is " + detail + "; " + extract_hint(manifest, cache_dir));
}

}  // namespace

TrainingTable load_training_table(const DatabaseManifest& manifest,
                                  const PoolSpec& pool,
                                  const fs::path& cache_dir, double alpha) {
  TrainingTable t;
  t.database_id = manifest.database;
  for (const auto& seq : manifest.sequences) {
    if (!seq.mos) {
      log_warning(manifest.database + "/" + seq.id + ": no MOS, skipped");
      continue;
    }
    const CachedSequence c = require_cache(manifest, seq, pool, cache_dir, alpha);
    TrainingRow r;
    r.sequence_id = seq.id;
    r.content_id = seq.source;
    r.features = c.mean();
    r.mos = manifest.normalized_mos(seq);
    t.rows.push_back(std::move(r));
  }
  if (t.rows.empty()) {
    throw InputError("manifest " + manifest.database +
                     " has no sequences with MOS to train on");
  }
  return t;
}

// ---------------------------------------------------------------------------
// train

std::vector<double> sequence_eadm(const DatabaseManifest& manifest,
                                  const SequenceRecord& seq,
                                  const std::vector<double>& alphas) {
  const SourceRecord& src = manifest.source_of(seq);
  auto ref = SequenceReader::open(src.path, src.spec);
  auto test = SequenceReader::open(seq.path, manifest.test_spec(seq));
  const ResampleRule rule =
      seq.resample ? ResampleRule::kBilinear : ResampleRule::kNone;
  PoolSpec only;
  only.keys = {FeatureKey{std::string(feature_names::kEadm), Channel::kY, 1}};
  std::vector<double> sums(alphas.size(), 0.0);
  std::shared_ptr<FrameAnalysis> prev;
  for (int i = 0; i < src.spec.frame_count; ++i) {
    auto a = std::make_shared<FrameAnalysis>(read_frame_pair(ref, test, i, rule),
                                             prev);
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      sums[k] += extract_feature_vector(*a, only, ExtractOptions{alphas[k]})
                     .values.front();
    }
    a->release_previous();
    prev = std::move(a);
  }
  for (double& s : sums) s /= src.spec.frame_count;
  return sums;
}

namespace {

void replace_eadm(TrainingTable& table, const std::vector<double>& values) {
  const FeatureKey key{std::string(feature_names::kEadm), Channel::kY, 1};
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    table.rows[i].features.set(key, values[i]);
  }
}

const SequenceRecord& find_sequence(const DatabaseManifest& m,
                                    const std::string& id) {
  for (const auto& s : m.sequences) {
    if (s.id == id) return s;
  }
  throw InputError("manifest " + m.database + ": unknown sequence " + id);
}

std::string keys_text(const std::vector<FeatureKey>& keys) {
  std::string out;
  for (const auto& k : keys) out += (out.empty() ? "" : " ") + k.to_string();
  return out;
}

}  // namespace

TrainResult cmd_train(const DatabaseManifest& manifest1,
                      const DatabaseManifest& manifest2, const PoolSpec& pool,
                      const fs::path& cache_dir, const TrainConfig& config) {
  const std::vector<FeatureKey> seed = vmaf_seed_keys();
  for (const auto& k : seed) {
    if (!pool.contains(k)) {
      throw ConfigurationError("pool lacks seed feature " + k.to_string());
    }
  }
  const double extraction_alpha = config.extraction_alpha();
  TrainingTable t1 = load_training_table(manifest1, pool, cache_dir, extraction_alpha);
  TrainingTable t2 = load_training_table(manifest2, pool, cache_dir, extraction_alpha);

  TrainResult result;
  double alpha = extraction_alpha;
  if (!config.alpha) {
    // alpha is chosen by the SROCC of E-ADM alone on the first training set
    std::vector<std::vector<double>> per_alpha(config.alpha_grid.size());
    for (const auto& row : t1.rows) {
      const auto v = sequence_eadm(manifest1, find_sequence(manifest1, row.sequence_id),
                                   config.alpha_grid);
      for (std::size_t k = 0; k < v.size(); ++k) per_alpha[k].push_back(v[k]);
    }
    const auto mos = t1.mos();
    double best = -2.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < config.alpha_grid.size(); ++k) {
      const double r = srocc(per_alpha[k], mos);
      result.alpha_scores.emplace_back(config.alpha_grid[k], r);
      if (r > best) {
        best = r;
        best_k = k;
      }
    }
    alpha = config.alpha_grid[best_k];
    log_info("alpha tuned to " + format_double(alpha));
    replace_eadm(t1, per_alpha[best_k]);
    std::vector<double> second;
    for (const auto& row : t2.rows) {
      second.push_back(sequence_eadm(manifest2,
                                     find_sequence(manifest2, row.sequence_id),
                                     {alpha})
                           .front());
    }
    replace_eadm(t2, second);
  }

  SfmsOptions opts;
  opts.folds = config.selection_folds;
  opts.seed = config.seed;

  std::vector<FeatureKey> pool1;
  for (const auto& k : pool.keys) {
    if (std::find(seed.begin(), seed.end(), k) == seed.end()) pool1.push_back(k);
  }
  result.selection1 = sfms_select(pool1, seed, t1, config.svr, opts);
  result.selection2 = sfms_select(pool.keys, {}, t2, config.svr, opts);
  if (result.selection2.selected.empty()) {
    throw TrainingError("model 2 selection produced no feature on " + t2.database_id);
  }
  log_info("model 1 features: " + keys_text(result.selection1.selected));
  log_info("model 2 features: " + keys_text(result.selection2.selected));

  FusionModel& m = result.model;
  m.model1 = train_svr(t1, result.selection1.selected, config.svr);
  m.model2 = train_svr(t2, result.selection2.selected, config.svr);
  m.alpha = alpha;
  m.pool_version = pool.version;
  m.extractor_version = kExtractorVersion;
  m.config_hash = config.hash();

  if (config.beta) {
    m.beta = *config.beta;
  } else {
    std::vector<BetaTuningSet> sets;
    for (const TrainingTable* t : {&t1, &t2}) {
      BetaTuningSet s;
      for (const auto& row : t->rows) {
        s.m1.push_back(predict_svr(m.model1, row.features));
        s.m2.push_back(predict_svr(m.model2, row.features));
        s.mos.push_back(row.mos);
      }
      sets.push_back(std::move(s));
    }
    m.beta = tune_beta(sets, config.beta_grid_step);
    log_info("beta tuned to " + format_double(m.beta));
  }
  return result;
}

// ---------------------------------------------------------------------------
// predict

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

PredictResult cmd_predict(const FusionModel& model, const PredictRequest& req) {
  VideoSpec test_spec = req.spec;
  if (req.test_size) {
    test_spec.width = req.test_size->first;
    test_spec.height = req.test_size->second;
  }
  auto ref = SequenceReader::open(req.ref, req.spec);
  auto test = SequenceReader::open(req.test, test_spec);
  const ResampleRule rule =
      req.test_size ? ResampleRule::kBilinear : ResampleRule::kNone;
  PoolSpec pool;
  pool.version = model.pool_version;
  pool.keys = model.required_keys();
  FeatureExtractor extractor(pool, ExtractOptions{model.alpha});

  PredictResult r;
  std::ostringstream csv;
  csv << "# evmaf-predict config=" << model.config_hash
      << " alpha=" << format_double(model.alpha)
      << " beta=" << format_double(model.beta) << "\n";
  csv << "frame,m1,m2,q\n";
  for (int i = 0; i < req.spec.frame_count; ++i) {
    const FeatureVector fv = extractor.push(read_frame_pair(ref, test, i, rule));
    const double m1 = predict_svr(model.model1, fv);
    const double m2 = predict_svr(model.model2, fv);
    const double q = combine_models(m1, m2, model.beta);
    if (!std::isfinite(q)) {
      throw ComputationError("non-finite score at frame " + std::to_string(i));
    }
    r.m1.push_back(m1);
    r.m2.push_back(m2);
    r.q.push_back(q);
    csv << i << "," << fixed(m1) << "," << fixed(m2) << "," << fixed(q) << "\n";
  }
  double sum = 0.0;
  for (double q : r.q) sum += q;
  r.sequence_score = sum / static_cast<double>(r.q.size());
  r.csv = csv.str();
  r.summary = "score=" + fixed(r.sequence_score, 4) +
              " frames=" + std::to_string(r.q.size()) +
              " config=" + model.config_hash;
  return r;
}

// ---------------------------------------------------------------------------
// evaluate

int EvalReport::refused_count() const {
  int n = 0;
  for (const auto& d : databases) n += d.refused ? 1 : 0;
  return n;
}

std::string EvalReport::render_table() const {
  std::ostringstream out;
  out << "# evmaf-report config=" << config_hash << " anchor=" << anchor << "\n";
  std::size_t width = 8;
  for (const auto& m : metrics) width = std::max(width, m.size() + 2);
  auto pad = [](std::string s, std::size_t w) {
    std::size_t glyphs = 0;  // UTF-8 continuation bytes take no column
    for (unsigned char c : s) glyphs += (c & 0xC0) != 0x80 ? 1 : 0;
    if (glyphs < w) s.append(w - glyphs, ' ');
    return s;
  };
  out << pad("metric", width);
  for (const auto& d : databases) out << pad(d.database, 16);
  out << "Overall\n";
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    out << pad(metrics[k], width);
    for (const auto& d : databases) {
      if (d.refused) {
        out << pad("refused", 16);
      } else {
        const int v = d.verdict[k];
        out << pad(fixed(d.srocc[k], 4) + " (" + (v > 0 ? "+1" : v < 0 ? "-1" : "0") + ")",
                   16);
      }
    }
    out << fixed(overall[k], 4) << "\n";
  }
  for (const auto& d : databases) {
    if (d.refused) out << "refused " << d.database << ": " << d.reason << "\n";
  }
  const auto& p = pairwise;
  if (p.a.total() > 0 || p.b.total() > 0) {
    out << "pairwise " << kModelMetric << " " << fixed(p.a.accuracy(), 4) << " ("
        << p.a.correct << "/" << p.a.total() << ") " << anchor << " "
        << fixed(p.b.accuracy(), 4) << " (" << p.b.correct << "/"
        << p.b.total() << ") fisher_p=";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", p.p_value);
    out << buf << "\n";
  }
  return out.str();
}

std::string EvalReport::render_csv() const {
  std::ostringstream out;
  out << "# evmaf-report config=" << config_hash << " anchor=" << anchor << "\n";
  out << "metric,database,srocc,verdict\n";
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    for (const auto& d : databases) {
      if (d.refused) continue;
      out << metrics[k] << "," << d.database << "," << format_double(d.srocc[k])
          << "," << d.verdict[k] << "\n";
    }
    out << metrics[k] << ",Overall," << format_double(overall[k]) << ",\n";
  }
  return out.str();
}

EvalReport cmd_evaluate(const FusionModel& model, const PoolSpec& pool,
                        const EvaluateRequest& req) {
  EvalReport rep;
  rep.config_hash = model.config_hash;
  rep.anchor = req.anchor;
  rep.metrics.push_back(kModelMetric);
  std::vector<FeatureKey> baseline_keys;
  for (const auto& b : req.baselines) {
    const FeatureKey k = FeatureKey::parse(b);
    if (!pool.contains(k)) {
      throw ConfigurationError("baseline " + b + " is not in the pool");
    }
    if (std::find(rep.metrics.begin(), rep.metrics.end(), k.to_string()) ==
        rep.metrics.end()) {
      rep.metrics.push_back(k.to_string());
      baseline_keys.push_back(k);
    }
  }
  for (const auto& k : model.required_keys()) {
    if (!pool.contains(k)) {
      throw ConfigurationError("model feature " + k.to_string() + " is not in the pool");
    }
  }
  const auto anchor_it = std::find(rep.metrics.begin(), rep.metrics.end(),
                                   req.anchor == kModelMetric
                                       ? req.anchor
                                       : FeatureKey::parse(req.anchor).to_string());
  if (anchor_it == rep.metrics.end()) {
    throw ConfigurationError("anchor " + req.anchor +
                             " is neither the model nor a listed baseline");
  }
  rep.anchor = *anchor_it;
  const std::size_t anchor = static_cast<std::size_t>(anchor_it - rep.metrics.begin());
  const std::size_t nm = rep.metrics.size();

  for (const auto& manifest : req.manifests) {
    DatabaseEval d;
    d.database = manifest.database;
    if (!manifest.has_all_mos()) {
      d.refused = true;
      d.reason = "manifest lacks MOS for some sequences";
      log_warning("evaluate " + d.database + ": refused, " + d.reason);
      rep.databases.push_back(std::move(d));
      continue;
    }
    d.scores.assign(nm, {});
    for (const auto& seq : manifest.sequences) {
      const CachedSequence c =
          require_cache(manifest, seq, pool, req.cache_dir, model.alpha);
      double sum = 0.0;
      for (const auto& f : c.frames) sum += model.predict(f);
      d.scores[0].push_back(sum / static_cast<double>(c.frames.size()));
      const FeatureVector mean = c.mean();
      for (std::size_t k = 0; k < baseline_keys.size(); ++k) {
        d.scores[k + 1].push_back(mean.at(baseline_keys[k]));
      }
      d.sequences.push_back(seq.id);
      d.mos.push_back(manifest.normalized_mos(seq));
    }
    std::vector<std::vector<double>> residuals(nm);
    for (std::size_t k = 0; k < nm; ++k) {
      d.srocc.push_back(srocc(d.scores[k], d.mos));
      residuals[k] = fit_logistic(d.scores[k], d.mos).residuals;
    }
    for (std::size_t k = 0; k < nm; ++k) {
      d.verdict.push_back(f_test_residuals(residuals[k], residuals[anchor]));
    }
    const auto mp = build_pairs(d.scores[0], d.mos);
    const auto ap = build_pairs(d.scores[anchor], d.mos);
    rep.model_pairs.insert(rep.model_pairs.end(), mp.begin(), mp.end());
    rep.anchor_pairs.insert(rep.anchor_pairs.end(), ap.begin(), ap.end());
    rep.databases.push_back(std::move(d));
  }

  for (std::size_t k = 0; k < nm; ++k) {
    std::vector<double> r;
    for (const auto& d : rep.databases) {
      if (!d.refused) r.push_back(d.srocc[k]);
    }
    rep.overall.push_back(r.empty() ? 0.0 : fisher_aggregate(r));
  }
  if (!rep.model_pairs.empty()) {
    rep.pairwise = compare_pairwise(rep.model_pairs, rep.anchor_pairs);
  }
  return rep;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write on " + path.string());
}

}  // namespace

void write_report(const EvalReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "report.txt", report.render_table());
  write_text(dir / "report.csv", report.render_csv());
  const std::string header = "config=" + report.config_hash;
  write_text(dir / (std::string("pairs_") + kModelMetric + ".csv"),
             render_pairs_csv(report.model_pairs, header + " metric=" + kModelMetric));
  if (report.anchor != kModelMetric) {
    write_text(dir / ("pairs_" + report.anchor + ".csv"),
               render_pairs_csv(report.anchor_pairs,
                                header + " metric=" + report.anchor));
  }
}

// ---------------------------------------------------------------------------
// compare-pairs

std::string render_pairs_csv(const std::vector<PairDiff>& pairs,
                             const std::string& header_comment) {
  std::ostringstream out;
  out << "# evmaf-pairs " << header_comment << "\n";
  out << "mos_diff,metric_diff\n";
  for (const auto& p : pairs) {
    out << format_double(p.mos_diff) << "," << format_double(p.metric_diff) << "\n";
  }
  return out.str();
}

std::vector<PairDiff> read_pairs_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read pairs file " + path.string());
  std::string line;
  int mos_col = -1;
  int metric_col = -1;
  std::vector<PairDiff> pairs;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (mos_col < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "mos_diff") mos_col = static_cast<int>(i);
        if (cells[i] == "metric_diff") metric_col = static_cast<int>(i);
      }
      if (mos_col < 0 || metric_col < 0) {
        throw MalformedInputError(path.string() +
                                  ": header needs mos_diff and metric_diff");
      }
      continue;
    }
    const auto need = static_cast<std::size_t>(std::max(mos_col, metric_col));
    if (cells.size() <= need) {
      throw MalformedInputError(path.string() + ":" + std::to_string(lineno) +
                                ": short row");
    }
    try {
      PairDiff p;
      p.mos_diff = std::stod(cells[mos_col]);
      p.metric_diff = std::stod(cells[metric_col]);
      if (!std::isfinite(p.mos_diff) || !std::isfinite(p.metric_diff)) {
        throw std::invalid_argument("non-finite");
      }
      pairs.push_back(p);
    } catch (const std::exception&) {
      throw MalformedInputError(path.string() + ":" + std::to_string(lineno) +
                                ": unparsable number");
    }
  }
  if (mos_col < 0) throw MalformedInputError(path.string() + ": empty pairs file");
  return pairs;
}

ComparePairsResult cmd_compare_pairs(const fs::path& a, const fs::path& b) {
  ComparePairsResult r;
  const auto pa = read_pairs_csv(a);
  const auto pb = read_pairs_csv(b);
  r.comparison = compare_pairwise(pa, pb);
  const auto& c = r.comparison;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "a=%.4f (%lld/%lld) b=%.4f (%lld/%lld) fisher_p=%.6g",
                c.a.accuracy(), static_cast<long long>(c.a.correct),
                static_cast<long long>(c.a.total()), c.b.accuracy(),
                static_cast<long long>(c.b.correct),
                static_cast<long long>(c.b.total()), c.p_value);
  r.summary = buf;
  return r;
}

}  // namespace evmaf
