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

#include "evmaf/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evmaf/error.hpp"

namespace evmaf {
namespace {

// Lifting constants of the CDF 9/7 biorthogonal wavelet.
constexpr double kLiftAlpha = -1.586134342059924;
constexpr double kLiftBeta = -0.052980118572961;
constexpr double kLiftGamma = 0.882911075530934;
constexpr double kLiftDelta = 0.443506852043971;
constexpr double kLiftK = 1.230174104914001;

// In-place 1-D analysis of an even-length signal; on return the first half
// holds the low band and the second half the high band. Both bands are
// scaled so the low-pass DC gain is sqrt(2), matching orthonormal Haar.
void analyze_1d(std::vector<double>& x, std::vector<double>& scratch,
                WaveletFamily family) {
  const std::size_t m = x.size() / 2;
  scratch.resize(x.size());
  double* s = scratch.data();
  double* d = scratch.data() + m;
  for (std::size_t i = 0; i < m; ++i) {
    s[i] = x[2 * i];
    d[i] = x[2 * i + 1];
  }
  if (family == WaveletFamily::kHaar) {
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double a = s[i];
      const double b = d[i];
      s[i] = (a + b) * r;
      d[i] = (a - b) * r;
    }
  } else {
    // Whole-sample symmetric extension: s[m] = s[m-1], d[-1] = d[0].
    auto s_next = [&](std::size_t i) { return i + 1 < m ? s[i + 1] : s[m - 1]; };
    auto d_prev = [&](std::size_t i) { return i > 0 ? d[i - 1] : d[0]; };
    for (std::size_t i = 0; i < m; ++i) d[i] += kLiftAlpha * (s[i] + s_next(i));
    for (std::size_t i = 0; i < m; ++i) s[i] += kLiftBeta * (d_prev(i) + d[i]);
    for (std::size_t i = 0; i < m; ++i) d[i] += kLiftGamma * (s[i] + s_next(i));
    for (std::size_t i = 0; i < m; ++i) s[i] += kLiftDelta * (d_prev(i) + d[i]);
    const double low_gain = std::sqrt(2.0) / kLiftK;
    const double high_gain = kLiftK / std::sqrt(2.0);
    for (std::size_t i = 0; i < m; ++i) {
      s[i] *= low_gain;
      d[i] *= high_gain;
    }
  }
  std::copy(scratch.begin(), scratch.end(), x.begin());
}

}  // namespace

DwtLevel dwt2d_level(const Plane& plane, WaveletFamily family) {
  if (plane.width() < 2 || plane.height() < 2) {
    throw DimensionError("dwt2d: plane must be at least 2x2");
  }
  const int ow = (plane.width() + 1) / 2;
  const int oh = (plane.height() + 1) / 2;
  const int pw = 2 * ow;
  const int ph = 2 * oh;

  // Rows, into a padded buffer laid out [low | high].
  Plane rows(pw, ph);
  std::vector<double> line;
  std::vector<double> scratch;
  for (int y = 0; y < ph; ++y) {
    const int sy = std::min(y, plane.height() - 1);
    line.assign(static_cast<std::size_t>(pw), 0.0);
    for (int x = 0; x < pw; ++x) line[x] = plane(std::min(x, plane.width() - 1), sy);
    analyze_1d(line, scratch, family);
    std::copy(line.begin(), line.end(), rows.row(y).begin());
  }

  DwtLevel out;
  out.approx = Plane(ow, oh);
  out.detail_h = Plane(ow, oh);
  out.detail_v = Plane(ow, oh);
  out.detail_d = Plane(ow, oh);
  line.resize(static_cast<std::size_t>(ph));
  for (int x = 0; x < pw; ++x) {
    for (int y = 0; y < ph; ++y) line[y] = rows(x, y);
    analyze_1d(line, scratch, family);
    const bool x_low = x < ow;
    const int bx = x_low ? x : x - ow;
    for (int y = 0; y < oh; ++y) {
      const double lo = line[y];
      const double hi = line[y + oh];
      if (x_low) {
        out.approx(bx, y) = lo;
        out.detail_h(bx, y) = hi;
      } else {
        out.detail_v(bx, y) = lo;
        out.detail_d(bx, y) = hi;
      }
    }
  }
  return out;
}

std::vector<DwtLevel> dwt2d(const Plane& plane, int levels,
                            WaveletFamily family) {
  if (levels < 1 || levels > 4) {
    throw DimensionError("dwt2d: levels must be in [1, 4]");
  }
  const int need = 1 << levels;
  if (plane.width() < need || plane.height() < need) {
    std::ostringstream why;
    why << "dwt2d: " << plane.width() << "x" << plane.height()
        << " plane too small for " << levels << " levels (need " << need
        << "x" << need << ")";
    throw DimensionError(why.str());
  }
  std::vector<DwtLevel> out;
  out.reserve(static_cast<std::size_t>(levels));
  const Plane* current = &plane;
  for (int l = 1; l <= levels; ++l) {
    out.push_back(dwt2d_level(*current, family));
    out.back().scale = l;
    current = &out.back().approx;
  }
  return out;
}

std::vector<Plane> build_scale_pyramid(const Plane& plane, int scales) {
  if (plane.width() < 16 || plane.height() < 16) {
    throw DimensionError("build_scale_pyramid: plane must be at least 16x16");
  }
  if (scales < 1 || scales > 4) {
    throw DimensionError("build_scale_pyramid: scales must be in [1, 4]");
  }
  std::vector<Plane> out;
  out.reserve(static_cast<std::size_t>(scales));
  out.push_back(plane);
  for (int s = 1; s < scales; ++s) {
    Plane next = dwt2d_level(out.back(), WaveletFamily::kHaar).approx;
    for (auto& v : next.values()) v *= 0.5;
    out.push_back(std::move(next));
  }
  return out;
}

namespace {

Plane central_gradient_x(const Plane& p) {
  Plane g(p.width(), p.height());
  const int w = p.width();
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(x - 1, 0);
      const int x1 = std::min(x + 1, w - 1);
      g(x, y) = x1 > x0 ? (p(x1, y) - p(x0, y)) / (x1 - x0) : 0.0;
    }
  }
  return g;
}

Plane central_gradient_y(const Plane& p) {
  Plane g(p.width(), p.height());
  const int h = p.height();
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(y - 1, 0);
    const int y1 = std::min(y + 1, h - 1);
    for (int x = 0; x < p.width(); ++x) {
      g(x, y) = y1 > y0 ? (p(x, y1) - p(x, y0)) / (y1 - y0) : 0.0;
    }
  }
  return g;
}

}  // namespace

FlowField lucas_kanade_flow(const Plane& prev, const Plane& curr,
                            const FlowOptions& options) {
  if (!prev.same_geometry(curr)) {
    throw DimensionError("lucas_kanade_flow: frames differ in geometry");
  }
  const int w = prev.width();
  const int h = prev.height();
  FlowField flow{Plane(w, h), Plane(w, h)};
  if (prev.empty()) return flow;

  // Spatial gradients averaged over both frames; temporal difference.
  Plane ix = central_gradient_x(prev);
  Plane iy = central_gradient_y(prev);
  {
    const Plane cx = central_gradient_x(curr);
    const Plane cy = central_gradient_y(curr);
    auto ixv = ix.values();
    auto iyv = iy.values();
    for (std::size_t i = 0; i < ixv.size(); ++i) {
      ixv[i] = 0.5 * (ixv[i] + cx.values()[i]);
      iyv[i] = 0.5 * (iyv[i] + cy.values()[i]);
    }
  }
  Plane ixx(w, h), ixy(w, h), iyy(w, h), ixt(w, h), iyt(w, h), itt(w, h);
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const double gx = ix.values()[i];
    const double gy = iy.values()[i];
    const double gt = curr.values()[i] - prev.values()[i];
    ixx.values()[i] = gx * gx;
    ixy.values()[i] = gx * gy;
    iyy.values()[i] = gy * gy;
    ixt.values()[i] = gx * gt;
    iyt.values()[i] = gy * gt;
    itt.values()[i] = gt * gt;
  }
  const int r = options.window / 2;
  const Plane sxx = box_sum(ixx, r);
  const Plane sxy = box_sum(ixy, r);
  const Plane syy = box_sum(iyy, r);
  const Plane sxt = box_sum(ixt, r);
  const Plane syt = box_sum(iyt, r);
  const Plane stt = box_sum(itt, r);

  for (std::size_t i = 0; i < prev.size(); ++i) {
    const double a = sxx.values()[i];
    const double b = sxy.values()[i];
    const double d = syy.values()[i];
    const double et = stt.values()[i];
    if (et <= 0.0) continue;
    const double half_trace = 0.5 * (a + d);
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    if (half_trace - disc < options.min_eigenvalue) continue;
    const double det = a * d - b * b;
    if (!(det > 0.0)) continue;
    const double ex = sxt.values()[i];
    const double ey = syt.values()[i];
    // Solve [a b; b d] [u v]^T = -[ex ey]^T.
    const double u = (-d * ex + b * ey) / det;
    const double v = (b * ex - a * ey) / det;
    // Residual energy of the linearized constancy equation at the optimum.
    const double residual = et + u * ex + v * ey;
    if (1.0 - residual / et < options.min_explained) continue;
    if (!std::isfinite(u) || !std::isfinite(v)) continue;
    flow.u.values()[i] = u;
    flow.v.values()[i] = v;
  }
  return flow;
}

Plane displaced_frame(const Plane& prev, const FlowField& flow) {
  if (!prev.same_geometry(flow.u) || !prev.same_geometry(flow.v)) {
    throw DimensionError("displaced_frame: flow geometry differs from frame");
  }
  const int w = prev.width();
  const int h = prev.height();
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double sx = std::clamp(x - flow.u(x, y), 0.0, w - 1.0);
      const double sy = std::clamp(y - flow.v(x, y), 0.0, h - 1.0);
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double wx = sx - x0;
      const double wy = sy - y0;
      const double top = prev(x0, y0) + wx * (prev(x1, y0) - prev(x0, y0));
      const double bottom = prev(x0, y1) + wx * (prev(x1, y1) - prev(x0, y1));
      out(x, y) = top + wy * (bottom - top);
    }
  }
  return out;
}

}  // namespace evmaf
