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

#include <cstddef>
#include <span>
#include <vector>

namespace evmaf {

// Row-major single-channel image of doubles. Intensities are normalized to
// [0, 1] when a plane comes out of the video reader; intermediate planes
// (wavelet bands, flow components) carry whatever range they need.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  double operator()(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<double> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }
  std::span<const double> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_geometry(const Plane& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Plane& a, const Plane& b) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// Half-sample symmetric reflection of an index into [0, n): -1 -> 0, n -> n-1.
int mirror_index(int i, int n);

double mean(const Plane& p);
double variance(const Plane& p);  // population variance
double sum_of_squares(const Plane& p);

// Normalized 1-D Gaussian taps, length `size` (odd), standard deviation sigma.
std::vector<double> gaussian_kernel(int size, double sigma);

// Same-size separable correlation with a symmetric kernel; borders use
// half-sample symmetric extension.
Plane filter_separable(const Plane& p, std::span<const double> kernel);

Plane gaussian_blur(const Plane& p, double sigma);

// Sum over the (2r+1)x(2r+1) neighbourhood, borders replicated.
Plane box_sum(const Plane& p, int radius);

// 2x2 block average; odd dimensions are padded by repeating the last
// row/column so the output is ceil(w/2) x ceil(h/2).
Plane downsample_2x2(const Plane& p);

// Bilinear resampling to (width, height) with pixel-centre alignment and
// clamped borders.
Plane resize_bilinear(const Plane& p, int width, int height);

// Nearest-neighbour replication, used to bring subsampled chroma up to luma
// geometry.
Plane upsample_nearest(const Plane& p, int width, int height);

Plane abs_difference(const Plane& a, const Plane& b);

}  // namespace evmaf
