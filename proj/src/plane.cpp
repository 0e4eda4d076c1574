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

#include "evmaf/plane.hpp"

#include <algorithm>
#include <cmath>

#include "evmaf/error.hpp"

namespace evmaf {

Plane::Plane(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw DimensionError("negative plane geometry");
  }
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

int mirror_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

double mean(const Plane& p) {
  if (p.empty()) return 0.0;
  double s = 0.0;
  for (double v : p.values()) s += v;
  return s / static_cast<double>(p.size());
}

double variance(const Plane& p) {
  if (p.empty()) return 0.0;
  const double m = mean(p);
  double s = 0.0;
  for (double v : p.values()) s += (v - m) * (v - m);
  return s / static_cast<double>(p.size());
}

double sum_of_squares(const Plane& p) {
  double s = 0.0;
  for (double v : p.values()) s += v * v;
  return s;
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  if (size < 1 || size % 2 == 0) {
    throw DimensionError("gaussian kernel size must be odd and positive");
  }
  std::vector<double> k(static_cast<std::size_t>(size));
  const int r = size / 2;
  double total = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + r)] = v;
    total += v;
  }
  for (double& v : k) v /= total;
  return k;
}

Plane filter_separable(const Plane& p, std::span<const double> kernel) {
  const int w = p.width();
  const int h = p.height();
  const int r = static_cast<int>(kernel.size()) / 2;
  Plane tmp(w, h);
  for (int y = 0; y < h; ++y) {
    auto src = p.row(y);
    auto dst = tmp.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      if (x >= r && x + r < w) {
        for (int k = -r; k <= r; ++k) acc += kernel[k + r] * src[x + k];
      } else {
        for (int k = -r; k <= r; ++k) {
          acc += kernel[k + r] * src[mirror_index(x + k, w)];
        }
      }
      dst[x] = acc;
    }
  }
  Plane out(w, h);
  std::vector<double> acc(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int k = -r; k <= r; ++k) {
      auto src = tmp.row(mirror_index(y + k, h));
      const double c = kernel[k + r];
      for (int x = 0; x < w; ++x) acc[x] += c * src[x];
    }
    std::copy(acc.begin(), acc.end(), out.row(y).begin());
  }
  return out;
}

Plane gaussian_blur(const Plane& p, double sigma) {
  if (sigma <= 0.0) return p;
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  const auto k = gaussian_kernel(2 * r + 1, sigma);
  return filter_separable(p, k);
}

Plane box_sum(const Plane& p, int radius) {
  const int w = p.width();
  const int h = p.height();
  // Integral image over the replicated-border extension.
  const int ew = w + 2 * radius;
  const int eh = h + 2 * radius;
  std::vector<double> integral(static_cast<std::size_t>(ew + 1) * (eh + 1),
                               0.0);
  auto at = [&](int x, int y) -> double& {
    return integral[static_cast<std::size_t>(y) * (ew + 1) + x];
  };
  for (int y = 0; y < eh; ++y) {
    const int sy = std::clamp(y - radius, 0, h - 1);
    double row_sum = 0.0;
    for (int x = 0; x < ew; ++x) {
      const int sx = std::clamp(x - radius, 0, w - 1);
      row_sum += p(sx, sy);
      at(x + 1, y + 1) = at(x + 1, y) + row_sum;
    }
  }
  Plane out(w, h);
  const int d = 2 * radius + 1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out(x, y) = at(x + d, y + d) - at(x, y + d) - at(x + d, y) + at(x, y);
    }
  }
  return out;
}

Plane downsample_2x2(const Plane& p) {
  const int w = p.width();
  const int h = p.height();
  const int ow = (w + 1) / 2;
  const int oh = (h + 1) / 2;
  Plane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(2 * y + 1, h - 1);
    for (int x = 0; x < ow; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(2 * x + 1, w - 1);
      out(x, y) = 0.25 * (p(x0, y0) + p(x1, y0) + p(x0, y1) + p(x1, y1));
    }
  }
  return out;
}

Plane resize_bilinear(const Plane& p, int width, int height) {
  if (p.width() == width && p.height() == height) return p;
  Plane out(width, height);
  const double sx = static_cast<double>(p.width()) / width;
  const double sy = static_cast<double>(p.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0,
                                 static_cast<double>(p.height() - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, p.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0,
                                   static_cast<double>(p.width() - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, p.width() - 1);
      const double wx = fx - x0;
      const double top = p(x0, y0) + wx * (p(x1, y0) - p(x0, y0));
      const double bottom = p(x0, y1) + wx * (p(x1, y1) - p(x0, y1));
      out(x, y) = top + wy * (bottom - top);
    }
  }
  return out;
}

Plane upsample_nearest(const Plane& p, int width, int height) {
  if (p.width() == width && p.height() == height) return p;
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(
        static_cast<int>(static_cast<long long>(y) * p.height() / height),
        p.height() - 1);
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(
          static_cast<int>(static_cast<long long>(x) * p.width() / width),
          p.width() - 1);
      out(x, y) = p(sx, sy);
    }
  }
  return out;
}

Plane abs_difference(const Plane& a, const Plane& b) {
  if (!a.same_geometry(b)) throw DimensionError("abs_difference: geometry");
  Plane out(a.width(), a.height());
  auto av = a.values();
  auto bv = b.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = std::abs(av[i] - bv[i]);
  return out;
}

}  // namespace evmaf
