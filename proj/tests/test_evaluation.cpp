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
#include <numeric>
#include <random>

#include "evmaf/error.hpp"
#include "evmaf/evaluation.hpp"
#include "support/published_rows.hpp"

using namespace evmaf;

namespace {

// Quadratic-time rank oracle: rank = #smaller + (#equal + 1) / 2.
std::vector<double> oracle_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : x) {
      if (v < x[i]) ++less;
      if (v == x[i]) ++equal;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = oracle_ranks(x);
  const auto ry = oracle_ranks(y);
  long double n = x.size(), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += rx[i];
    sy += ry[i];
    sxx += (long double)rx[i] * rx[i];
    syy += (long double)ry[i] * ry[i];
    sxy += (long double)rx[i] * ry[i];
  }
  const long double cov = sxy - sx * sy / n;
  const long double vx = sxx - sx * sx / n;
  const long double vy = syy - sy * sy / n;
  if (vx == 0 || vy == 0) return 0.0;
  return static_cast<double>(cov / std::sqrt(vx * vy));
}

std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Exact hypergeometric enumeration with integer probabilities.
double oracle_fisher(const Table2x2& t) {
  const int r0 = t[0][0] + t[0][1], r1 = t[1][0] + t[1][1];
  const int c0 = t[0][0] + t[1][0], c1 = t[0][1] + t[1][1];
  if (!r0 || !r1 || !c0 || !c1) return 1.0;
  auto w = [&](int a) { return binom(r0, a) * binom(r1, c0 - a); };
  const std::uint64_t obs = w(static_cast<int>(t[0][0]));
  std::uint64_t sum = 0;
  for (int a = std::max(0, c0 - r1); a <= std::min(r0, c0); ++a) {
    if (w(a) <= obs) sum += w(a);
  }
  return static_cast<double>(sum) / static_cast<double>(binom(r0 + r1, c0));
}

}  // namespace

TEST(Srocc, PerfectAndReversed) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  EXPECT_EQ(srocc(x, std::vector<double>{2, 4, 8, 16, 32}), 1.0);
  EXPECT_EQ(srocc(x, std::vector<double>{5, 4, 3, 2, 1}), -1.0);
  const auto d = srocc_detail(x, std::vector<double>(5, 3.0));
  EXPECT_EQ(d.value, 0.0);
  EXPECT_TRUE(d.degenerate);
}

TEST(Srocc, MatchesBruteForceOracle) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    const int n = std::uniform_int_distribution<int>(2, 50)(rng);
    std::uniform_int_distribution<int> small(0, 6);
    std::normal_distribution<double> g;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = t % 2 ? small(rng) : g(rng);
      y[i] = t % 3 ? small(rng) : g(rng);
    }
    EXPECT_NEAR(srocc(x, y), oracle_spearman(x, y), 1e-12);
  }
}

TEST(Srocc, RankInvariance) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(30), y(30), fx(30);
    for (int i = 0; i < 30; ++i) {
      x[i] = g(rng);
      y[i] = x[i] + g(rng);
      fx[i] = std::exp(3.0 * x[i]) + 7.0;
    }
    EXPECT_NEAR(srocc(x, y), srocc(fx, y), 1e-15);
  }
}

TEST(FisherAggregate, PublishedRows) {
  for (const auto& row : synth::kPublishedRows) {
    if (row.metric == "ST-VMAF") continue;  // documented outlier, see acceptance
    EXPECT_NEAR(fisher_aggregate(row.srocc), row.overall, 0.0015) << row.metric;
  }
}

TEST(FisherAggregate, EqualInputsAndBounds) {
  const std::vector<double> same(7, 0.8123);
  EXPECT_EQ(fisher_aggregate(same), 0.8123);
  const std::vector<double> mixed = {0.2, 0.5, 0.9};
  const double a = fisher_aggregate(mixed);
  EXPECT_GT(a, 0.2);
  EXPECT_LT(a, 0.9);
  const std::vector<double> one = {1.0, 0.5};
  EXPECT_TRUE(std::isfinite(fisher_aggregate(one)));
}

TEST(Logistic, RecoversSynthesizedParameters) {
  const std::array<double, 4> b = {80.0, 0.15, 40.0, 10.0};
  std::vector<double> m, y;
  for (int i = 0; i < 40; ++i) {
    m.push_back(2.0 * i + 0.5);
    y.push_back(b[0] / (1.0 + std::exp(-b[1] * (m.back() - b[2]))) + b[3]);
  }
  const LogisticFit fit = fit_logistic(m, y);
  EXPECT_FALSE(fit.linear_fallback);
  EXPECT_LT(fit.residual_rms(), 1e-6);
}

TEST(Logistic, IdentityAndConstant) {
  std::vector<double> m = {3, 9, 14, 20, 33, 41, 57, 70};
  EXPECT_LT(fit_logistic(m, m).residual_rms(), 1e-9);
  const std::vector<double> c(8, 2.0);
  const LogisticFit fit = fit_logistic(c, m);
  EXPECT_TRUE(fit.linear_fallback);
  const double mu = std::accumulate(m.begin(), m.end(), 0.0) / m.size();
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_NEAR(fit.residuals[i], m[i] - mu, 1e-12);
  }
  EXPECT_THROW(fit_logistic(std::vector<double>{1, 2, 3, 4},
                            std::vector<double>{1, 2, 3, 4}),
               InputError);
}

TEST(FTest, Verdicts) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> b(50);
  for (auto& v : b) v = g(rng);
  std::vector<double> a = b;
  for (auto& v : a) v *= 0.01;
  EXPECT_EQ(f_test_residuals(b, b), 0);
  EXPECT_EQ(f_test_residuals(a, b), 1);
  EXPECT_EQ(f_test_residuals(b, a), -1);
  const std::vector<double> four = {1, 2, 3, 4};
  EXPECT_TRUE(f_test_detail(four, four).insufficient);
}

TEST(FTest, CriticalValueMatchesTables) {
  // Upper 2.5% point of F(40, 40) is 1.8752 in standard tables.
  const std::vector<double> r(44, 1.0);
  EXPECT_NEAR(f_test_detail(r, r).critical, 1.8752, 5e-4);
}

TEST(FTest, Antisymmetric) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(20), b(20);
    const double s = std::exp(g(rng));
    for (int i = 0; i < 20; ++i) {
      a[i] = g(rng) * s;
      b[i] = g(rng);
    }
    EXPECT_EQ(f_test_residuals(a, b), -f_test_residuals(b, a));
  }
}

TEST(Pairwise, OrderingAndAccuracy) {
  const std::vector<double> mos = {10, 40, 40, 90};
  const auto ident = build_pairs(mos, mos);
  ASSERT_EQ(ident.size(), 6u);
  for (const auto& p : ident) EXPECT_GE(p.mos_diff, 0.0);
  EXPECT_EQ(pairwise_accuracy(ident).accuracy(), 1.0);
  std::vector<double> neg = mos;
  for (auto& v : neg) v = -v;
  const auto c = pairwise_accuracy(build_pairs(neg, mos));
  EXPECT_EQ(c.correct, 1);  // only the MOS tie
  EXPECT_EQ(c.mos_ties, 1);
}

TEST(FisherExact, SmallCases) {
  EXPECT_NEAR(fisher_exact({{{5, 5}, {5, 5}}}), 1.0, 1e-12);
  EXPECT_NEAR(fisher_exact({{{10, 0}, {0, 10}}}), oracle_fisher({{{10, 0}, {0, 10}}}), 1e-15);
  EXPECT_NEAR(fisher_exact({{{10, 0}, {0, 10}}}), 2.0 / 184756.0, 1e-18);
  EXPECT_EQ(fisher_exact({{{0, 0}, {3, 4}}}), 1.0);
}

TEST(FisherExact, BruteForceSmallMargins) {
  for (int a = 0; a <= 12; ++a) {
    for (int b = 0; b + a <= 12; ++b) {
      for (int c = 0; c + a <= 12; ++c) {
        for (int d = 0; d + c <= 12 && d + b <= 12; ++d) {
          const Table2x2 t = {{{a, b}, {c, d}}};
          const double p = fisher_exact(t);
          EXPECT_NEAR(p, oracle_fisher(t), 1e-12 * std::max(1.0, p));
          const Table2x2 tt = {{{a, c}, {b, d}}};
          EXPECT_NEAR(p, fisher_exact(tt), 1e-12);
        }
      }
    }
  }
}
