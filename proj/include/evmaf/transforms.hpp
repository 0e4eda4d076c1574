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

#pragma once

#include <vector>

#include "evmaf/plane.hpp"

namespace evmaf {

enum class WaveletFamily {
  kHaar,   // orthonormal Haar, used for the feature pyramid and BL/ED
  kCdf97,  // CDF 9/7 lifting, used inside ADM
};

// One level of a separable 2-D decomposition. Every band has
// ceil(parent_w / 2) x ceil(parent_h / 2) samples; odd parents are padded by
// repeating their last row/column.
//
//   detail_h: low-pass along x, high-pass along y (horizontal edges)
//   detail_v: high-pass along x, low-pass along y (vertical edges)
//   detail_d: high-pass along both axes
struct DwtLevel {
  Plane approx;
  Plane detail_h;
  Plane detail_v;
  Plane detail_d;
  int scale = 1;
};

DwtLevel dwt2d_level(const Plane& plane, WaveletFamily family);

// Decomposes `levels` times along the approximation chain; entry i holds
// scale i + 1. Requires 1 <= levels <= 4 and both dimensions >= 2^levels.
std::vector<DwtLevel> dwt2d(const Plane& plane, int levels,
                            WaveletFamily family);

// Scale 1 is the input; scale i + 1 is the Haar approximation band of scale
// i rescaled by 1/2 so that intensities keep their range (a constant plane
// stays constant). Requires a plane of at least 16x16.
std::vector<Plane> build_scale_pyramid(const Plane& plane, int scales = 4);

struct FlowField {
  Plane u;  // horizontal displacement, pixels
  Plane v;  // vertical displacement, pixels
};

struct FlowOptions {
  int window = 7;
  // Windows whose structure tensor has a smaller eigenvalue below this
  // (summed over the window, normalized intensity units) get zero flow.
  double min_eigenvalue = 1e-6;
  // Windows where the fitted translation explains less than this fraction of
  // the temporal difference energy also get zero flow.
  double min_explained = 0.5;
};

// Single-level Lucas-Kanade. The flow maps `prev` onto `curr`:
// curr(x, y) ~ prev(x - u, y - v).
FlowField lucas_kanade_flow(const Plane& prev, const Plane& curr,
                            const FlowOptions& options = {});

// prev warped by `flow` with bilinear sampling; samples falling outside the
// frame are clamped to the border. Zero flow reproduces prev bit-exactly.
Plane displaced_frame(const Plane& prev, const FlowField& flow);

}  // namespace evmaf
