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

#include "evmaf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "evmaf/error.hpp"
#include "evmaf/evaluation.hpp"
#include "evmaf/log.hpp"

namespace evmaf {

using json = nlohmann::json;

std::vector<double> TrainingTable::column(const FeatureKey& key) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.features.at(key));
  return out;
}

std::vector<double> TrainingTable::mos() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.mos);
  return out;
}

// ---------------------------------------------------------------------------
// Normalization

Normalizer::Normalizer(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
  if (mins_.size() != maxs_.size()) {
    throw InputError("normalizer: min and max lists differ in length");
  }
}

Normalizer Normalizer::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InputError("normalize_features: empty table");
  std::vector<double> lo = rows.front();
  std::vector<double> hi = rows.front();
  for (const auto& r : rows) {
    if (r.size() != lo.size()) throw InputError("normalize_features: ragged rows");
    for (std::size_t i = 0; i < r.size(); ++i) {
      lo[i] = std::min(lo[i], r[i]);
      hi[i] = std::max(hi[i], r[i]);
    }
  }
  return Normalizer(std::move(lo), std::move(hi));
}

std::vector<double> Normalizer::apply(const std::vector<double>& row) const {
  if (row.size() != mins_.size()) {
    throw InputError("normalizer: expected " + std::to_string(mins_.size()) +
                     " values, got " + std::to_string(row.size()));
  }
  std::vector<double> out(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    const double span = maxs_[i] - mins_[i];
    out[i] = span > 0.0 ? std::clamp((row[i] - mins_[i]) / span, 0.0, 1.0) : 0.0;
  }
  return out;
}

namespace {

std::vector<double> gather(const FeatureVector& fv,
                           const std::vector<FeatureKey>& keys) {
  std::vector<double> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back(fv.at(k));
  return out;
}

void check_keys(const std::vector<FeatureKey>& keys) {
  if (keys.empty()) throw InputError("model feature list is empty");
  std::set<std::string> seen;
  for (const auto& k : keys) {
    if (!seen.insert(k.to_string()).second) {
      throw InputError("feature " + k.to_string() + " listed twice");
    }
  }
}

}  // namespace

NormalizedTable normalize_features(const TrainingTable& table,
                                   const std::vector<FeatureKey>& keys) {
  if (table.rows.empty()) throw InputError("normalize_features: empty table");
  std::vector<std::vector<double>> raw;
  raw.reserve(table.rows.size());
  for (const auto& r : table.rows) raw.push_back(gather(r.features, keys));
  NormalizedTable out;
  out.normalizer = Normalizer::fit(raw);
  out.x.reserve(raw.size());
  for (const auto& r : raw) out.x.push_back(out.normalizer.apply(r));
  out.y = table.mos();
  return out;
}

// ---------------------------------------------------------------------------
// nu-SVR solver (SMO with the nu working-set rule, no shrinking)

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double rbf(const std::vector<double>& a, const std::vector<double>& b,
           double gamma) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return std::exp(-gamma * d);
}

class NuSolver {
 public:
  // Variables 0..l-1 carry sign +1, l..2l-1 sign -1; Q_ij = s_i s_j K.
  NuSolver(const std::vector<std::vector<double>>& kernel,
           std::vector<double> p, std::vector<double> alpha, double c,
           double eps)
      : k_(kernel),
        l_(static_cast<int>(kernel.size())),
        n_(2 * l_),
        p_(std::move(p)),
        alpha_(std::move(alpha)),
        c_(c),
        eps_(eps) {
    g_ = p_;
    for (int i = 0; i < n_; ++i) {
      if (alpha_[i] > 0.0) {
        for (int j = 0; j < n_; ++j) g_[j] += alpha_[i] * q(i, j);
      }
    }
  }

  long long solve(long long max_iter) {
    long long iter = 0;
    while (true) {
      int i = -1;
      int j = -1;
      if (!select_working_set(i, j)) break;
      if (++iter > max_iter) {
        throw TrainingError("nu-SVR solver did not converge within " +
                            std::to_string(max_iter) + " iterations");
      }
      update_pair(i, j);
    }
    return iter;
  }

  const std::vector<double>& alpha() const { return alpha_; }

  double rho() const {
    int nr_free1 = 0, nr_free2 = 0;
    double ub1 = kInf, ub2 = kInf, lb1 = -kInf, lb2 = -kInf;
    double sum_free1 = 0.0, sum_free2 = 0.0;
    for (int i = 0; i < n_; ++i) {
      const bool pos = sign(i) > 0;
      double& ub = pos ? ub1 : ub2;
      double& lb = pos ? lb1 : lb2;
      if (upper(i)) {
        lb = std::max(lb, g_[i]);
      } else if (lower(i)) {
        ub = std::min(ub, g_[i]);
      } else if (pos) {
        ++nr_free1;
        sum_free1 += g_[i];
      } else {
        ++nr_free2;
        sum_free2 += g_[i];
      }
    }
    const double r1 = nr_free1 > 0 ? sum_free1 / nr_free1 : (ub1 + lb1) / 2.0;
    const double r2 = nr_free2 > 0 ? sum_free2 / nr_free2 : (ub2 + lb2) / 2.0;
    return (r1 - r2) / 2.0;
  }

 private:
  int sign(int i) const { return i < l_ ? 1 : -1; }
  double q(int i, int j) const {
    return sign(i) * sign(j) * k_[i % l_][j % l_];
  }
  bool upper(int i) const { return alpha_[i] >= c_; }
  bool lower(int i) const { return alpha_[i] <= 0.0; }

  bool select_working_set(int& out_i, int& out_j) const {
    double gmaxp = -kInf, gmaxn = -kInf;
    int ip = -1, in = -1;
    for (int t = 0; t < n_; ++t) {
      if (sign(t) > 0) {
        if (!upper(t) && -g_[t] >= gmaxp) {
          gmaxp = -g_[t];
          ip = t;
        }
      } else if (!lower(t) && g_[t] >= gmaxn) {
        gmaxn = g_[t];
        in = t;
      }
    }
    double gmaxp2 = -kInf, gmaxn2 = -kInf;
    double obj_min = kInf;
    int jmin = -1;
    for (int j = 0; j < n_; ++j) {
      if (sign(j) > 0) {
        if (lower(j)) continue;
        const double grad_diff = gmaxp + g_[j];
        gmaxp2 = std::max(gmaxp2, g_[j]);
        if (grad_diff > 0.0) {
          double quad = 2.0 - 2.0 * q(ip, j);
          if (quad <= 0.0) quad = kTau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= obj_min) {
            jmin = j;
            obj_min = obj;
          }
        }
      } else {
        if (upper(j)) continue;
        const double grad_diff = gmaxn - g_[j];
        gmaxn2 = std::max(gmaxn2, -g_[j]);
        if (grad_diff > 0.0) {
          double quad = 2.0 - 2.0 * q(in, j);
          if (quad <= 0.0) quad = kTau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= obj_min) {
            jmin = j;
            obj_min = obj;
          }
        }
      }
    }
    if (std::max(gmaxp + gmaxp2, gmaxn + gmaxn2) < eps_ || jmin == -1) {
      return false;
    }
    out_i = sign(jmin) > 0 ? ip : in;
    out_j = jmin;
    return true;
  }

  // Both variables share a sign under the nu working-set rule.
  void update_pair(int i, int j) {
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    double quad = 2.0 - 2.0 * q(i, j);  // RBF diagonal is 1
    if (quad <= 0.0) quad = kTau;
    const double delta = (g_[i] - g_[j]) / quad;
    const double sum = old_i + old_j;
    double ai = old_i - delta;
    double aj = old_j + delta;
    if (sum > c_) {
      if (ai > c_) {
        ai = c_;
        aj = sum - c_;
      }
    } else if (aj < 0.0) {
      aj = 0.0;
      ai = sum;
    }
    if (sum > c_) {
      if (aj > c_) {
        aj = c_;
        ai = sum - c_;
      }
    } else if (ai < 0.0) {
      ai = 0.0;
      aj = sum;
    }
    alpha_[i] = ai;
    alpha_[j] = aj;
    const double di = ai - old_i;
    const double dj = aj - old_j;
    for (int k = 0; k < n_; ++k) g_[k] += q(i, k) * di + q(j, k) * dj;
  }

  const std::vector<std::vector<double>>& k_;
  int l_;
  int n_;
  std::vector<double> p_;
  std::vector<double> alpha_;
  std::vector<double> g_;
  double c_;
  double eps_;
};

}  // namespace

SvrModel train_svr_matrix(const std::vector<std::vector<double>>& x,
                          const std::vector<double>& mos,
                          const SvrHyper& hyper) {
  const int l = static_cast<int>(x.size());
  if (l < 2) throw InputError("train_svr: need at least 2 rows");
  if (mos.size() != x.size()) throw InputError("train_svr: row/target mismatch");
  if (!(hyper.nu > 0.0 && hyper.nu <= 1.0)) {
    throw ConfigurationError("train_svr: nu must be in (0, 1]");
  }
  if (!(hyper.C > 0.0)) throw ConfigurationError("train_svr: C must be > 0");
  const std::size_t dims = x.front().size();
  if (dims == 0) throw InputError("train_svr: no features");

  SvrModel model;
  model.C = hyper.C;
  model.nu = hyper.nu;
  model.gamma = hyper.gamma > 0.0 ? hyper.gamma : 1.0 / static_cast<double>(dims);

  std::vector<std::vector<double>> kernel(l, std::vector<double>(l));
  for (int i = 0; i < l; ++i) {
    kernel[i][i] = 1.0;
    for (int j = 0; j < i; ++j) {
      kernel[i][j] = kernel[j][i] = rbf(x[i], x[j], model.gamma);
    }
  }
  std::vector<double> p(2 * l);
  std::vector<double> alpha(2 * l);
  double sum = hyper.C * hyper.nu * l / 2.0;
  for (int i = 0; i < l; ++i) {
    const double y = mos[i] / 100.0;
    alpha[i] = alpha[i + l] = std::min(sum, hyper.C);
    sum -= alpha[i];
    p[i] = -y;
    p[i + l] = y;
  }
  NuSolver solver(kernel, std::move(p), std::move(alpha), hyper.C, hyper.eps);
  model.iterations = solver.solve(hyper.max_iterations);
  model.rho = solver.rho();
  const auto& a = solver.alpha();
  for (int i = 0; i < l; ++i) {
    const double coef = a[i] - a[i + l];
    if (coef != 0.0) {
      model.support_vectors.push_back(x[i]);
      model.coefficients.push_back(coef);
    }
  }
  return model;
}

SvrModel train_svr(const TrainingTable& table,
                   const std::vector<FeatureKey>& keys, const SvrHyper& hyper) {
  check_keys(keys);
  if (table.rows.size() < 8) {
    throw InputError("train_svr: need at least 8 rows, got " +
                     std::to_string(table.rows.size()));
  }
  NormalizedTable nt = normalize_features(table, keys);
  SvrModel model = train_svr_matrix(nt.x, nt.y, hyper);
  model.keys = keys;
  model.normalizer = std::move(nt.normalizer);
  return model;
}

double SvrModel::decision(const std::vector<double>& normalized) const {
  double s = 0.0;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    s += coefficients[i] * rbf(support_vectors[i], normalized, gamma);
  }
  return s - rho;
}

double SvrModel::predict_row(const std::vector<double>& raw) const {
  const double v = 100.0 * decision(normalizer.apply(raw));
  return std::clamp(v, 0.0, 100.0);
}

double predict_svr(const SvrModel& model, const FeatureVector& features) {
  return model.predict_row(gather(features, model.keys));
}

json SvrModel::to_json() const {
  json j;
  j["feature_keys"] = render_keys(keys);
  j["normalizer"] = {{"min", normalizer.mins()}, {"max", normalizer.maxs()}};
  j["kernel"] = {{"type", "rbf"}, {"gamma", gamma}};
  j["C"] = C;
  j["nu"] = nu;
  j["rho"] = rho;
  j["support_vectors"] = support_vectors;
  j["coefficients"] = coefficients;
  return j;
}

SvrModel SvrModel::from_json(const json& j) {
  try {
    SvrModel m;
    m.keys = parse_keys(j.at("feature_keys").get<std::vector<std::string>>());
    check_keys(m.keys);
    m.normalizer = Normalizer(j.at("normalizer").at("min").get<std::vector<double>>(),
                              j.at("normalizer").at("max").get<std::vector<double>>());
    if (j.at("kernel").at("type").get<std::string>() != "rbf") {
      throw MalformedInputError("model: unsupported kernel type");
    }
    m.gamma = j.at("kernel").at("gamma").get<double>();
    m.C = j.at("C").get<double>();
    m.nu = j.at("nu").get<double>();
    m.rho = j.at("rho").get<double>();
    m.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (m.normalizer.mins().size() != m.keys.size() ||
        m.support_vectors.size() != m.coefficients.size()) {
      throw MalformedInputError("model: inconsistent array sizes");
    }
    for (const auto& sv : m.support_vectors) {
      if (sv.size() != m.keys.size()) {
        throw MalformedInputError("model: support vector width mismatch");
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw MalformedInputError(std::string("model: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Selection

double selection_score(const TrainingTable& table,
                       const std::vector<FeatureKey>& keys,
                       const SvrHyper& hyper, const SfmsOptions& options) {
  const auto mos = table.mos();
  if (options.folds < 2) {
    const SvrModel m = train_svr(table, keys, hyper);
    std::vector<double> pred;
    pred.reserve(table.rows.size());
    for (const auto& r : table.rows) pred.push_back(predict_svr(m, r.features));
    return srocc(pred, mos);
  }
  // Content-grouped folds: every row of a source lands in the same fold.
  std::map<std::string, int> fold_of;
  for (const auto& r : table.rows) fold_of.emplace(r.content_id, 0);
  if (static_cast<int>(fold_of.size()) < options.folds) {
    throw ConfigurationError("sfms: fewer content groups than folds");
  }
  std::vector<std::string> groups;
  for (const auto& [id, f] : fold_of) groups.push_back(id);
  std::mt19937_64 rng(options.seed);
  std::shuffle(groups.begin(), groups.end(), rng);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    fold_of[groups[g]] = static_cast<int>(g % static_cast<std::size_t>(options.folds));
  }
  std::vector<double> pred(table.rows.size());
  for (int f = 0; f < options.folds; ++f) {
    TrainingTable train;
    train.database_id = table.database_id;
    for (const auto& r : table.rows) {
      if (fold_of[r.content_id] != f) train.rows.push_back(r);
    }
    const SvrModel m = train_svr(train, keys, hyper);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (fold_of[table.rows[i].content_id] == f) {
        pred[i] = predict_svr(m, table.rows[i].features);
      }
    }
  }
  return srocc(pred, mos);
}

SfmsResult sfms_select(const std::vector<FeatureKey>& pool,
                       const std::vector<FeatureKey>& seed,
                       const TrainingTable& table, const SvrHyper& hyper,
                       const SfmsOptions& options) {
  if (pool.empty() && seed.empty()) {
    throw InputError("sfms_select: both pool and seed set are empty");
  }
  for (const auto& k : pool) {
    if (std::find(seed.begin(), seed.end(), k) != seed.end()) {
      throw InputError("sfms_select: " + k.to_string() + " is in pool and seed");
    }
  }
  SfmsResult out;
  out.selected = seed;
  double j = seed.empty() ? -kInf : selection_score(table, seed, hyper, options);
  out.trace.push_back(j);
  std::vector<FeatureKey> remaining = pool;
  while (!remaining.empty()) {
    double best = -kInf;
    std::size_t best_idx = 0;
    for (std::size_t c = 0; c < remaining.size(); ++c) {
      auto trial = out.selected;
      trial.push_back(remaining[c]);
      const double s = selection_score(table, trial, hyper, options);
      if (s > best) {
        best = s;
        best_idx = c;
      }
    }
    if (!(best > j)) break;
    j = best;
    out.selected.push_back(remaining[best_idx]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_idx));
    out.trace.push_back(j);
    log_info("sfms: added " + out.selected.back().to_string() +
             ", J = " + std::to_string(j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Combination

double combine_models(double m1, double m2, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw InputError("combine_models: beta " + std::to_string(beta) +
                     " outside [0, 1]");
  }
  return beta * m1 + (1.0 - beta) * m2;
}

double tune_beta(const std::vector<BetaTuningSet>& sets, double grid_step) {
  if (sets.empty()) throw InputError("tune_beta: no databases");
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw ConfigurationError("tune_beta: grid step must be in (0, 1]");
  }
  for (const auto& s : sets) {
    if (s.m1.size() != s.mos.size() || s.m2.size() != s.mos.size() ||
        s.mos.size() < 2) {
      throw InputError("tune_beta: misaligned prediction lists");
    }
  }
  const int steps = static_cast<int>(std::llround(1.0 / grid_step));
  double best_beta = 0.5;
  double best_score = -kInf;
  for (int k = 0; k <= steps; ++k) {
    const double beta = std::min(1.0, k * grid_step);
    std::vector<double> r;
    for (const auto& s : sets) {
      std::vector<double> q(s.mos.size());
      for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = combine_models(s.m1[i], s.m2[i], beta);
      }
      r.push_back(srocc(q, s.mos));
    }
    const double score = fisher_aggregate(r);
    if (score > best_score + 1e-12) {
      best_score = score;
      best_beta = beta;
    } else if (std::abs(score - best_score) <= 1e-12 &&
               std::abs(beta - 0.5) < std::abs(best_beta - 0.5)) {
      best_beta = beta;
    }
  }
  return best_beta;
}

// ---------------------------------------------------------------------------
// Fusion model

std::vector<FeatureKey> FusionModel::required_keys() const {
  std::vector<FeatureKey> out = model1.keys;
  for (const auto& k : model2.keys) {
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

double FusionModel::predict(const FeatureVector& features) const {
  return combine_models(predict_svr(model1, features),
                        predict_svr(model2, features), beta);
}

json FusionModel::to_json() const {
  json j;
  j["schema"] = kModelSchema;
  j["schema_version"] = kModelSchemaVersion;
  j["pool_version"] = pool_version;
  j["extractor_version"] = extractor_version;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["config_hash"] = config_hash;
  j["output_range"] = {0.0, 100.0};
  j["model1"] = model1.to_json();
  j["model2"] = model2.to_json();
  return j;
}

FusionModel FusionModel::from_json(const json& j) {
  try {
    if (j.value("schema", std::string()) != kModelSchema) {
      throw VersionError("not an evmaf model file (schema field missing)");
    }
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw VersionError("model schema_version " + std::to_string(version) +
                         " is not supported (this build reads " +
                         std::to_string(kModelSchemaVersion) + ")");
    }
    FusionModel m;
    m.pool_version = j.at("pool_version").get<int>();
    m.extractor_version = j.at("extractor_version").get<int>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.config_hash = j.value("config_hash", std::string());
    if (!(m.beta >= 0.0 && m.beta <= 1.0)) {
      throw MalformedInputError("model: beta outside [0, 1]");
    }
    m.model1 = SvrModel::from_json(j.at("model1"));
    m.model2 = SvrModel::from_json(j.at("model2"));
    return m;
  } catch (const json::exception& e) {
    throw MalformedInputError(std::string("model: ") + e.what());
  }
}

std::string FusionModel::serialize() const { return to_json().dump(1) + "\n"; }

void FusionModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model " + path.string());
  out << serialize();
}

FusionModel FusionModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw MalformedInputError("model " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace evmaf
