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

#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace evmaf::synth {

Plane random_plane(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Plane p(width, height);
  for (auto& v : p.values()) v = u(rng);
  return p;
}

Plane textured_plane(int width, int height, std::uint64_t seed, double sigma) {
  Plane p = gaussian_blur(random_plane(width, height, seed), sigma);
  const double m = mean(p);
  const double sd = std::sqrt(variance(p));
  for (auto& v : p.values()) {
    v = sd > 0.0 ? std::clamp(0.5 + 0.15 * (v - m) / sd, 0.05, 0.95) : 0.5;
  }
  return p;
}

Plane crop(const Plane& p, int x0, int y0, int width, int height) {
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out(x, y) = p(x0 + x, y0 + y);
  }
  return out;
}

Plane add_noise(const Plane& p, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  Plane out = p;
  for (auto& v : out.values()) v = std::clamp(v + n(rng), 0.0, 1.0);
  return out;
}

Plane quantize(const Plane& p, int levels) {
  Plane out = p;
  const double step = 1.0 / static_cast<double>(levels - 1);
  for (auto& v : out.values()) v = std::round(v / step) * step;
  return out;
}

Plane constant_plane(int width, int height, double value) {
  return Plane(width, height, value);
}

Frame make_frame(const Plane& y, const Plane& cb, const Plane& cr) {
  return Frame{{y, cb, cr}};
}

Frame gray_chroma_frame(const Plane& y) {
  return make_frame(y, Plane(y.width() / 2, y.height() / 2, 0.5),
                    Plane(y.width() / 2, y.height() / 2, 0.5));
}

FramePair make_pair(const Frame& ref, const Frame& test, int index) {
  return make_frame_pair(ref, test, index);
}

}  // namespace evmaf::synth
