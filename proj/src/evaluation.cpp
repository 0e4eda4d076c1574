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

#include "evmaf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>

#include "evmaf/error.hpp"
#include "evmaf/log.hpp"

namespace evmaf {

namespace {

void require_aligned(std::span<const double> x, std::span<const double> y,
                     std::size_t min_n, const char* what) {
  if (x.size() != y.size()) {
    throw InputError(std::string(what) + ": inputs differ in length");
  }
  if (x.size() < min_n) {
    throw InputError(std::string(what) + ": need at least " +
                     std::to_string(min_n) + " values");
  }
}

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

std::vector<double> fractional_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_aligned(x, y, 2, "pearson");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SroccResult srocc_detail(std::span<const double> x, std::span<const double> y) {
  require_aligned(x, y, 2, "srocc");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw InputError("srocc: non-finite input");
    }
  }
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  const bool cx = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
  const bool cy = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  if (cx || cy) return {0.0, true};
  return {pearson(rx, ry), false};
}

double srocc(std::span<const double> x, std::span<const double> y) {
  return srocc_detail(x, y).value;
}

double fisher_aggregate(std::span<const double> r) {
  if (r.empty()) throw InputError("fisher_aggregate: no values");
  if (std::all_of(r.begin(), r.end(), [&](double v) { return v == r[0]; }) &&
      std::abs(r[0]) < 1.0) {
    return r[0];
  }
  double z = 0.0;
  for (double v : r) {
    if (!std::isfinite(v)) throw InputError("fisher_aggregate: non-finite value");
    if (std::abs(v) >= 1.0) {
      log_warning("fisher_aggregate: |r| = 1 clamped to " +
                  std::to_string(kFisherClamp));
      v = std::copysign(kFisherClamp, v);
    }
    z += std::atanh(v);
  }
  return std::tanh(z / static_cast<double>(r.size()));
}

// ---------------------------------------------------------------------------
// Logistic mapping

double LogisticFit::map(double m) const {
  if (linear_fallback) return slope * m + intercept;
  return b[0] / (1.0 + std::exp(-b[1] * (m - b[2]))) + b[3];
}

double LogisticFit::residual_rms() const {
  if (residuals.empty()) return 0.0;
  double s = 0.0;
  for (double r : residuals) s += r * r;
  return std::sqrt(s / static_cast<double>(residuals.size()));
}

namespace {

constexpr int kLmMaxIterations = 5000;

double sse_of(const std::array<double, 4>& b, std::span<const double> m,
              std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double f = b[0] / (1.0 + std::exp(-b[1] * (m[i] - b[2]))) + b[3];
    s += (y[i] - f) * (y[i] - f);
  }
  return s;
}

// Solves a 4x4 system by Gaussian elimination with partial pivoting.
bool solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4> rhs,
            std::array<double, 4>& x) {
  for (int c = 0; c < 4; ++c) {
    int p = c;
    for (int r = c + 1; r < 4; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (!(std::abs(a[p][c]) > 0.0)) return false;
    std::swap(a[p], a[c]);
    std::swap(rhs[p], rhs[c]);
    for (int r = c + 1; r < 4; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  for (int r = 3; r >= 0; --r) {
    double s = rhs[r];
    for (int k = r + 1; k < 4; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

struct LmOutcome {
  std::array<double, 4> b{};
  double sse = 0.0;
  bool converged = false;
  int iterations = 0;
};

LmOutcome levenberg_marquardt(std::array<double, 4> b, std::span<const double> m,
                              std::span<const double> y) {
  LmOutcome out;
  double lambda = 1e-3;
  double sse = sse_of(b, m, y);
  const double scale = std::max(1.0, sse);
  for (int it = 0; it < kLmMaxIterations; ++it) {
    out.iterations = it + 1;
    std::array<std::array<double, 4>, 4> jtj{};
    std::array<double, 4> jtr{};
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double e = std::exp(-b[1] * (m[i] - b[2]));
      const double s = 1.0 / (1.0 + e);
      const double ds = s * s * e;  // d s / d(b1 (m - b3))
      const std::array<double, 4> j = {s, b[0] * ds * (m[i] - b[2]),
                                       -b[0] * ds * b[1], 1.0};
      const double r = y[i] - (b[0] * s + b[3]);
      for (int p = 0; p < 4; ++p) {
        jtr[p] += j[p] * r;
        for (int q = 0; q < 4; ++q) jtj[p][q] += j[p] * j[q];
      }
    }
    double grad = 0.0;
    for (double g : jtr) grad = std::max(grad, std::abs(g));
    if (grad <= 1e-14 * scale || sse <= 1e-28 * scale) {
      out.converged = true;
      break;
    }
    bool improved = false;
    while (lambda < 1e16) {
      auto a = jtj;
      for (int p = 0; p < 4; ++p) a[p][p] += lambda * std::max(jtj[p][p], 1e-12);
      std::array<double, 4> step{};
      if (solve4(a, jtr, step)) {
        std::array<double, 4> trial = b;
        for (int p = 0; p < 4; ++p) trial[p] += step[p];
        const double trial_sse = sse_of(trial, m, y);
        if (std::isfinite(trial_sse) && trial_sse < sse) {
          const double rel = (sse - trial_sse) / std::max(sse, 1e-300);
          b = trial;
          sse = trial_sse;
          lambda = std::max(lambda * 0.1, 1e-12);
          improved = true;
          if (rel < 1e-15) out.converged = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No descent direction left: a stationary point for this damping.
      out.converged = true;
      break;
    }
    if (out.converged) break;
  }
  out.b = b;
  out.sse = sse;
  return out;
}

}  // namespace

LogisticFit fit_logistic(std::span<const double> metric,
                         std::span<const double> mos) {
  require_aligned(metric, mos, 5, "fit_logistic");
  const std::size_t n = metric.size();
  LogisticFit fit;

  // Linear least squares, used as fallback and as a yardstick.
  const double mm = mean_of(metric);
  const double my = mean_of(mos);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (metric[i] - mm) * (mos[i] - my);
    sxx += (metric[i] - mm) * (metric[i] - mm);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * mm;
  double linear_sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = mos[i] - (slope * metric[i] + intercept);
    linear_sse += r * r;
  }

  bool use_linear = sxx <= 0.0;
  if (!use_linear) {
    std::vector<double> sorted(metric.begin(), metric.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = n % 2 == 1 ? sorted[n / 2]
                                     : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    const auto [lo, hi] = std::minmax_element(mos.begin(), mos.end());
    const double sd = std::sqrt(sxx / static_cast<double>(n));
    std::array<double, 4> b0 = {*hi - *lo, (slope >= 0.0 ? 1.0 : -1.0) / sd,
                                median, *lo};
    if (b0[0] == 0.0) b0[0] = 1.0;
    const LmOutcome lm = levenberg_marquardt(b0, metric, mos);
    fit.iterations = lm.iterations;
    if (!lm.converged || !std::isfinite(lm.sse)) {
      log_warning("fit_logistic: optimizer did not converge, using linear fit");
      use_linear = true;
    } else if (linear_sse < lm.sse) {
      use_linear = true;
    } else {
      fit.b = lm.b;
    }
  }
  fit.linear_fallback = use_linear;
  fit.slope = slope;
  fit.intercept = intercept;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) fit.residuals[i] = mos[i] - fit.map(metric[i]);
  return fit;
}

// ---------------------------------------------------------------------------
// F-test

FTestResult f_test_detail(std::span<const double> res_a,
                          std::span<const double> res_b, double confidence) {
  if (res_a.size() != res_b.size()) {
    throw InputError("f_test_residuals: residual vectors differ in length");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InputError("f_test_residuals: confidence must be in (0, 1)");
  }
  FTestResult out;
  const std::size_t n = res_a.size();
  if (n < 5) {
    out.insufficient = true;
    return out;
  }
  const double df = static_cast<double>(n - 4);
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    va += res_a[i] * res_a[i];
    vb += res_b[i] * res_b[i];
  }
  va /= df;
  vb /= df;
  boost::math::fisher_f dist(df, df);
  out.critical = boost::math::quantile(dist, 1.0 - (1.0 - confidence) / 2.0);
  if (va == vb) {
    out.ratio = 1.0;
    return out;
  }
  out.ratio = vb > 0.0 ? va / vb : std::numeric_limits<double>::infinity();
  const double big = std::max(va, vb);
  const double small = std::min(va, vb);
  if (small == 0.0 || big / small > out.critical) out.verdict = va < vb ? 1 : -1;
  return out;
}

int f_test_residuals(std::span<const double> res_a,
                     std::span<const double> res_b, double confidence) {
  return f_test_detail(res_a, res_b, confidence).verdict;
}

// ---------------------------------------------------------------------------
// Pairwise protocol

std::vector<PairDiff> build_pairs(std::span<const double> metric,
                                  std::span<const double> mos) {
  require_aligned(metric, mos, 0, "build_pairs");
  std::vector<PairDiff> out;
  const std::size_t n = metric.size();
  out.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (mos[i] >= mos[j]) {
        out.push_back({mos[i] - mos[j], metric[i] - metric[j]});
      } else {
        out.push_back({mos[j] - mos[i], metric[j] - metric[i]});
      }
    }
  }
  return out;
}

double PairwiseCounts::accuracy() const {
  const auto n = total();
  return n > 0 ? static_cast<double>(correct) / static_cast<double>(n) : 0.0;
}

PairwiseCounts pairwise_accuracy(std::span<const PairDiff> pairs) {
  if (pairs.empty()) throw InputError("pairwise_accuracy: no pairs");
  PairwiseCounts c;
  for (const auto& p : pairs) {
    if (p.mos_diff < 0.0) {
      throw InputError("pairwise_accuracy: pair with negative MOS difference");
    }
    if (p.metric_diff >= 0.0) {
      ++c.correct;
    } else {
      ++c.incorrect;
    }
    if (p.metric_diff == 0.0) ++c.metric_ties;
    if (p.mos_diff == 0.0) ++c.mos_ties;
  }
  return c;
}

double fisher_exact(const Table2x2& t) {
  for (const auto& row : t) {
    for (auto v : row) {
      if (v < 0) throw InputError("fisher_exact: negative count");
    }
  }
  const std::int64_t r0 = t[0][0] + t[0][1];
  const std::int64_t r1 = t[1][0] + t[1][1];
  const std::int64_t c0 = t[0][0] + t[1][0];
  const std::int64_t c1 = t[0][1] + t[1][1];
  if (r0 == 0 || r1 == 0 || c0 == 0 || c1 == 0) return 1.0;
  const std::int64_t n = r0 + r1;
  auto lf = [](std::int64_t k) { return std::lgamma(static_cast<double>(k) + 1.0); };
  const double base = lf(r0) + lf(r1) + lf(c0) + lf(c1) - lf(n);
  auto log_p = [&](std::int64_t a) {
    return base - lf(a) - lf(r0 - a) - lf(c0 - a) - lf(r1 - c0 + a);
  };
  const std::int64_t lo = std::max<std::int64_t>(0, c0 - r1);
  const std::int64_t hi = std::min(r0, c0);
  const double observed = log_p(t[0][0]);
  const double cutoff = observed + std::log1p(1e-7);
  double p = 0.0;
  for (std::int64_t a = lo; a <= hi; ++a) {
    const double lp = log_p(a);
    if (lp <= cutoff) p += std::exp(lp);
  }
  return std::min(p, 1.0);
}

PairwiseComparison compare_pairwise(std::span<const PairDiff> a,
                                    std::span<const PairDiff> b) {
  PairwiseComparison out;
  out.a = pairwise_accuracy(a);
  out.b = pairwise_accuracy(b);
  out.table = {{{out.a.correct, out.a.incorrect}, {out.b.correct, out.b.incorrect}}};
  out.p_value = fisher_exact(out.table);
  return out;
}

}  // namespace evmaf
