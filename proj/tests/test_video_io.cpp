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

#include <filesystem>
#include <fstream>

#include "evmaf/error.hpp"
#include "evmaf/video_io.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace evmaf;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("evmaf_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<Frame> textured_frames(int w, int h, int n, std::uint64_t seed) {
  std::vector<Frame> frames;
  for (int i = 0; i < n; ++i) {
    frames.push_back(synth::make_frame(
        synth::textured_plane(w, h, seed + i),
        synth::textured_plane(w / 2, h / 2, seed + 100 + i),
        synth::textured_plane(w / 2, h / 2, seed + 200 + i)));
  }
  return frames;
}

VideoSpec spec_of(int w, int h, int n, int bits = 8) {
  VideoSpec s;
  s.width = w;
  s.height = h;
  s.bit_depth = bits;
  s.frame_count = n;
  return s;
}

}  // namespace

TEST(VideoIo, OpenRawCountsFrames) {
  const auto dir = temp_dir("open_raw");
  write_raw_yuv(dir / "a.yuv", textured_frames(64, 64, 5, 1), 8);
  EXPECT_EQ(fs::file_size(dir / "a.yuv"), 64u * 64u * 3u / 2u * 5u);
  auto r = SequenceReader::open(dir / "a.yuv", spec_of(64, 64, 5));
  EXPECT_EQ(r.frame_count(), 5);
}

TEST(VideoIo, ShortFileReportsByteCounts) {
  const auto dir = temp_dir("short");
  write_raw_yuv(dir / "a.yuv", textured_frames(64, 64, 5, 1), 8);
  fs::resize_file(dir / "a.yuv", 64 * 64 * 3 / 2 * 5 - 1);
  try {
    SequenceReader::open(dir / "a.yuv", spec_of(64, 64, 5));
    FAIL() << "expected a malformed-input error";
  } catch (const MalformedInputError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("30720"), std::string::npos) << what;
    EXPECT_NE(what.find("30719"), std::string::npos) << what;
  }
}

TEST(VideoIo, TenBitMaxCodeIsOne) {
  const auto dir = temp_dir("tenbit");
  const Frame f = synth::make_frame(synth::constant_plane(64, 64, 1.0),
                                      synth::constant_plane(32, 32, 0.0),
                                      synth::constant_plane(32, 32, 0.5));
  write_raw_yuv(dir / "a.yuv", {f, f}, 10);
  auto r = SequenceReader::open(dir / "a.yuv", spec_of(64, 64, 2, 10));
  const Frame back = r.read_frame(1);
  EXPECT_EQ(back.planes[0](10, 10), 1.0);
  EXPECT_EQ(back.planes[1](3, 3), 0.0);
  EXPECT_DOUBLE_EQ(back.planes[2](3, 3), 512.0 / 1023.0);
  EXPECT_EQ(normalize_code(1023, 10), 1.0);
}

TEST(VideoIo, NormalizationIsOrderPreserving) {
  for (unsigned c = 0; c < 1023; ++c) {
    EXPECT_LT(normalize_code(c, 10), normalize_code(c + 1, 10));
  }
}

TEST(VideoIo, RereadIsBitIdentical) {
  const auto dir = temp_dir("reread");
  write_raw_yuv(dir / "a.yuv", textured_frames(64, 64, 3, 7), 8);
  auto r1 = SequenceReader::open(dir / "a.yuv", spec_of(64, 64, 3));
  auto r2 = SequenceReader::open(dir / "a.yuv", spec_of(64, 64, 3));
  const Frame a = r1.read_frame(2);
  const Frame b = r1.read_frame(2);
  const Frame c = r2.read_frame(2);
  for (int p = 0; p < 3; ++p) {
    EXPECT_EQ(a.planes[p], b.planes[p]);
    EXPECT_EQ(a.planes[p], c.planes[p]);
  }
}

TEST(VideoIo, IdenticalFilesGiveIdenticalPair) {
  const auto dir = temp_dir("identical");
  write_raw_yuv(dir / "a.yuv", textured_frames(64, 64, 2, 3), 8);
  auto ref = SequenceReader::open(dir / "a.yuv", spec_of(64, 64, 2));
  auto test = SequenceReader::open(dir / "a.yuv", spec_of(64, 64, 2));
  const FramePair p = read_frame_pair(ref, test, 0);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(p.ref[c], p.test[c]);
  EXPECT_THROW(read_frame_pair(ref, test, 2), OutOfRangeError);
}

TEST(VideoIo, GeometryMismatchNeedsRule) {
  const auto dir = temp_dir("resample");
  write_raw_yuv(dir / "ref.yuv", textured_frames(128, 128, 2, 4), 8);
  write_raw_yuv(dir / "low.yuv", textured_frames(64, 64, 2, 5), 8);
  auto ref = SequenceReader::open(dir / "ref.yuv", spec_of(128, 128, 2));
  auto low = SequenceReader::open(dir / "low.yuv", spec_of(64, 64, 2));
  EXPECT_THROW(read_frame_pair(ref, low, 0), ConfigurationError);

  const FramePair p = read_frame_pair(ref, low, 1, ResampleRule::kBilinear);
  ASSERT_EQ(p.test[0].width(), 128);
  ASSERT_EQ(p.test[1].width(), 64);
  // Independent bilinear oracle with pixel-centre alignment.
  const Plane src = low.read_frame(1).planes[0];
  for (int y = 0; y < 128; y += 7) {
    for (int x = 0; x < 128; x += 5) {
      const double sx = std::clamp((x + 0.5) * 0.5 - 0.5, 0.0, 63.0);
      const double sy = std::clamp((y + 0.5) * 0.5 - 0.5, 0.0, 63.0);
      const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, 63), y1 = std::min(y0 + 1, 63);
      const double fx = sx - x0, fy = sy - y0;
      const double expect =
          (1 - fy) * ((1 - fx) * src(x0, y0) + fx * src(x1, y0)) +
          fy * ((1 - fx) * src(x0, y1) + fx * src(x1, y1));
      EXPECT_NEAR(p.test[0](x, y), expect, 1e-12);
    }
  }
}

TEST(VideoIo, Y4mRoundTripAndHeaderMismatch) {
  const auto dir = temp_dir("y4m");
  const auto frames = textured_frames(64, 64, 3, 9);
  write_y4m(dir / "a.y4m", frames, 8, 25.0);
  write_raw_yuv(dir / "a.yuv", frames, 8);
  auto y = SequenceReader::open(dir / "a.y4m", spec_of(64, 64, 3));
  auto r = SequenceReader::open(dir / "a.yuv", spec_of(64, 64, 3));
  for (int i = 0; i < 3; ++i) {
    const Frame a = y.read_frame(i);
    const Frame b = r.read_frame(i);
    for (int p = 0; p < 3; ++p) EXPECT_EQ(a.planes[p], b.planes[p]);
  }
  auto fewer = SequenceReader::open(dir / "a.y4m", spec_of(64, 64, 2));
  EXPECT_EQ(fewer.frame_count(), 2);
}

TEST(VideoIo, SpecValidation) {
  EXPECT_THROW(spec_of(63, 64, 2).validate(), ConfigurationError);
  EXPECT_THROW(spec_of(32, 32, 2).validate(), ConfigurationError);
  EXPECT_THROW(spec_of(64, 64, 1).validate(), ConfigurationError);
  EXPECT_THROW(spec_of(64, 64, 2, 12).validate(), ConfigurationError);
  EXPECT_NO_THROW(spec_of(64, 64, 2).validate());
}
