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

// Rank statistics and the subjective-evaluation protocol: SROCC, Fisher-z
// aggregation, logistic mapping, residual F-tests, pairwise accuracy and
// Fisher's exact test.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace evmaf {

// Average (fractional) ranks, 1-based. Ties share the mean of their positions.
std::vector<double> fractional_ranks(std::span<const double> x);

// Two-pass Pearson correlation. Returns 0 when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

struct SroccResult {
  double value = 0.0;
  bool degenerate = false;  // one side was constant
};

SroccResult srocc_detail(std::span<const double> x, std::span<const double> y);
double srocc(std::span<const double> x, std::span<const double> y);

inline constexpr double kFisherClamp = 0.999999;

// tanh(mean(atanh(r))). |r| >= 1 is clamped to kFisherClamp with a warning.
double fisher_aggregate(std::span<const double> r);

struct LogisticFit {
  // mos ~ b[0] / (1 + exp(-b[1] (m - b[2]))) + b[3]
  std::array<double, 4> b{};
  bool linear_fallback = false;
  double slope = 0.0;
  double intercept = 0.0;
  int iterations = 0;
  std::vector<double> residuals;  // mos - mapped(metric)

  double map(double metric) const;
  double residual_rms() const;
};

LogisticFit fit_logistic(std::span<const double> metric,
                         std::span<const double> mos);

struct FTestResult {
  int verdict = 0;  // +1: A has significantly smaller residual variance
  bool insufficient = false;
  double ratio = 1.0;     // var(A) / var(B)
  double critical = 0.0;  // upper quantile used for max/min ratio
};

FTestResult f_test_detail(std::span<const double> res_a,
                          std::span<const double> res_b,
                          double confidence = 0.95);
int f_test_residuals(std::span<const double> res_a,
                     std::span<const double> res_b, double confidence = 0.95);

struct PairDiff {
  double mos_diff = 0.0;  // >= 0
  double metric_diff = 0.0;
};

// All n(n-1)/2 pairs of one database, each ordered so mos_diff >= 0.
std::vector<PairDiff> build_pairs(std::span<const double> metric,
                                  std::span<const double> mos);

struct PairwiseCounts {
  std::int64_t correct = 0;
  std::int64_t incorrect = 0;
  std::int64_t metric_ties = 0;  // pairs with metric_diff == 0 (counted correct)
  std::int64_t mos_ties = 0;     // pairs with mos_diff == 0

  std::int64_t total() const { return correct + incorrect; }
  double accuracy() const;
};

PairwiseCounts pairwise_accuracy(std::span<const PairDiff> pairs);

using Table2x2 = std::array<std::array<std::int64_t, 2>, 2>;

// Two-sided exact test; tables at most (1 + 1e-7) times as likely as the
// observed one are summed. Any zero margin gives 1.
double fisher_exact(const Table2x2& t);

struct PairwiseComparison {
  PairwiseCounts a;
  PairwiseCounts b;
  Table2x2 table{};  // rows: metric a, metric b; cols: correct, incorrect
  double p_value = 1.0;
};

PairwiseComparison compare_pairwise(std::span<const PairDiff> a,
                                    std::span<const PairDiff> b);

}  // namespace evmaf
