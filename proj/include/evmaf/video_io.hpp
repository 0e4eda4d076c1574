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

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "evmaf/plane.hpp"

namespace evmaf {

enum class Channel { kY = 0, kCb = 1, kCr = 2 };

inline constexpr std::array<Channel, 3> kAllChannels = {
    Channel::kY, Channel::kCb, Channel::kCr};

const char* channel_name(Channel c);

enum class ContainerFormat { kRawYuv, kY4m };

// Geometry of a 4:2:0 planar sequence. Luma dimensions are even and at least
// 64, and there are at least two frames so temporal features have a
// predecessor to work with.
struct VideoSpec {
  int width = 0;
  int height = 0;
  double fps = 25.0;
  int bit_depth = 8;
  int frame_count = 0;

  void validate() const;

  int chroma_width() const { return width / 2; }
  int chroma_height() const { return height / 2; }
  int bytes_per_sample() const { return bit_depth > 8 ? 2 : 1; }
  std::uintmax_t frame_bytes() const;
  double max_code() const { return static_cast<double>((1 << bit_depth) - 1); }

  friend bool operator==(const VideoSpec&, const VideoSpec&) = default;
};

// Three planes (Y, Cb, Cr) at native 4:2:0 geometry, normalized to [0, 1].
struct Frame {
  std::array<Plane, 3> planes;

  const Plane& plane(Channel c) const { return planes[static_cast<int>(c)]; }
};

// Single-consumer handle over a raw .yuv or .y4m file. Frames are decoded on
// demand; reading the same index twice yields bit-identical planes.
class SequenceReader {
 public:
  static SequenceReader open(const std::filesystem::path& path,
                             const VideoSpec& spec);
  static SequenceReader open(const std::filesystem::path& path,
                             const VideoSpec& spec, ContainerFormat format);

  SequenceReader(SequenceReader&&) = default;
  SequenceReader& operator=(SequenceReader&&) = default;

  const VideoSpec& spec() const { return spec_; }
  int frame_count() const { return spec_.frame_count; }
  const std::filesystem::path& path() const { return path_; }

  Frame read_frame(int index);

 private:
  SequenceReader() = default;

  std::filesystem::path path_;
  VideoSpec spec_;
  std::ifstream stream_;
  std::vector<std::uintmax_t> frame_offsets_;
};

ContainerFormat guess_format(const std::filesystem::path& path);

// Maps a code value to [0, 1] by dividing by 2^bit_depth - 1.
inline double normalize_code(unsigned code, int bit_depth) {
  return static_cast<double>(code) / static_cast<double>((1 << bit_depth) - 1);
}

enum class ResampleRule { kNone, kBilinear };

// Co-registered reference/test planes for one frame index.
struct FramePair {
  std::array<Plane, 3> ref;
  std::array<Plane, 3> test;
  int frame_index = 0;

  const Plane& ref_plane(Channel c) const { return ref[static_cast<int>(c)]; }
  const Plane& test_plane(Channel c) const { return test[static_cast<int>(c)]; }
};

// Reads frame `index` from both handles. A test stream whose geometry
// differs from the reference is upsampled to it when `rule` is kBilinear and
// rejected with a ConfigurationError otherwise.
FramePair read_frame_pair(SequenceReader& ref, SequenceReader& test, int index,
                          ResampleRule rule = ResampleRule::kNone);

FramePair make_frame_pair(Frame ref, Frame test, int index,
                          ResampleRule rule = ResampleRule::kNone);

// Chroma plane of a pair at luma geometry (nearest neighbour); luma is
// returned unchanged.
Plane full_geometry(const Plane& plane, int luma_width, int luma_height);

// Writers used by tooling and tests to materialize synthetic sequences.
// Values are clamped to [0, 1] and rounded to the nearest code.
void write_raw_yuv(const std::filesystem::path& path,
                   const std::vector<Frame>& frames, int bit_depth);
void write_y4m(const std::filesystem::path& path,
               const std::vector<Frame>& frames, int bit_depth, double fps);

}  // namespace evmaf
