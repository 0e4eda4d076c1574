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

#include "support/synthetic_db.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "evmaf/error.hpp"
#include "evmaf/plane.hpp"
#include "evmaf/video_io.hpp"
#include "support/synthetic.hpp"

namespace evmaf::synth {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::array<double, kDegradationLevels>, 4> kImpairment = {{
    {10.0, 25.0, 45.0, 65.0},  // blur
    {5.0, 18.0, 35.0, 55.0},   // banding
    {8.0, 20.0, 38.0, 60.0},   // noise
    {12.0, 28.0, 42.0, 58.0},  // resample
}};

constexpr std::array<double, kDegradationLevels> kBlurSigma = {0.6, 1.2, 2.0, 3.2};
constexpr std::array<int, kDegradationLevels> kBandLevels = {48, 24, 12, 6};
constexpr std::array<double, kDegradationLevels> kNoiseSigma = {0.01, 0.025, 0.05, 0.09};
constexpr std::array<double, kDegradationLevels> kResampleScale = {0.75, 0.5, 0.375, 0.25};

struct Content {
  double sigma;
  int dx;
  int dy;
};

Content content_for(int source) {
  static const std::array<Content, 8> table = {{
      {2.0, 1, 0}, {3.0, 0, 1}, {4.0, 1, 1}, {6.0, 2, 0},
      {2.5, 0, 2}, {5.0, 2, 1}, {3.5, 1, 2}, {8.0, 2, 2},
  }};
  return table[static_cast<std::size_t>(source) % table.size()];
}

std::vector<Frame> source_frames(int source, const SyntheticDbOptions& o) {
  const Content c = content_for(source);
  const int margin = 16;
  const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(source) * 7919;
  const Plane luma = textured_plane(o.width + 2 * margin, o.height + 2 * margin,
                                    seed, c.sigma);
  const int cw = o.width / 2 + margin;
  const int ch = o.height / 2 + margin;
  Plane cb = textured_plane(cw, ch, seed + 1, c.sigma);
  Plane cr = textured_plane(cw, ch, seed + 2, c.sigma);
  for (auto* p : {&cb, &cr}) {
    for (auto& v : p->values()) v = 0.5 + 0.4 * (v - 0.5);
  }
  std::vector<Frame> frames;
  for (int t = 0; t < o.frames; ++t) {
    const int x = margin / 2 + t * c.dx;
    const int y = margin / 2 + t * c.dy;
    frames.push_back(make_frame(crop(luma, x, y, o.width, o.height),
                                crop(cb, x / 2, y / 2, o.width / 2, o.height / 2),
                                crop(cr, x / 2, y / 2, o.width / 2, o.height / 2)));
  }
  return frames;
}

int even(double v) { return std::max(2, 2 * static_cast<int>(std::lround(v / 2.0))); }

Frame degrade(const Frame& f, Degradation d, int level, std::uint64_t seed) {
  Frame out = f;
  switch (d) {
    case Degradation::kBlur:
      for (auto& p : out.planes) p = gaussian_blur(p, kBlurSigma[level]);
      break;
    case Degradation::kBanding:
      out.planes[0] = quantize(f.planes[0], kBandLevels[level]);
      break;
    case Degradation::kNoise:
      out.planes[0] = add_noise(f.planes[0], kNoiseSigma[level], seed);
      break;
    case Degradation::kResample: {
      const Plane& y = f.planes[0];
      const int w = even(y.width() * kResampleScale[level]);
      const int h = even(y.height() * kResampleScale[level]);
      out.planes[0] = resize_bilinear(y, w, h);
      out.planes[1] = resize_bilinear(f.planes[1], w / 2, h / 2);
      out.planes[2] = resize_bilinear(f.planes[2], w / 2, h / 2);
      break;
    }
  }
  return out;
}

}  // namespace

const char* degradation_name(Degradation d) {
  switch (d) {
    case Degradation::kBlur:
      return "blur";
    case Degradation::kBanding:
      return "banding";
    case Degradation::kNoise:
      return "noise";
    case Degradation::kResample:
      return "resample";
  }
  return "?";
}

std::vector<Degradation> all_degradations() {
  return {Degradation::kBlur, Degradation::kBanding, Degradation::kNoise,
          Degradation::kResample};
}

double ground_truth_impairment(Degradation d, int level) {
  if (level < 0 || level >= kDegradationLevels) {
    throw OutOfRangeError("degradation level out of range");
  }
  return kImpairment[static_cast<std::size_t>(d)][static_cast<std::size_t>(level)];
}

DatabaseManifest write_synthetic_database(const fs::path& dir,
                                          const std::string& name,
                                          const SyntheticDbOptions& o) {
  const fs::path root = dir / name;
  fs::create_directories(root);
  DatabaseManifest m;
  m.database = name;
  for (int s : o.sources) {
    const std::string sid = "src" + std::to_string(s);
    const auto frames = source_frames(s, o);
    SourceRecord src;
    src.id = sid;
    src.path = root / (sid + ".yuv");
    src.spec = VideoSpec{o.width, o.height, 25.0, 8, o.frames};
    write_raw_yuv(src.path, frames, 8);
    m.sources.push_back(src);

    auto add = [&](const std::string& id, const std::vector<Frame>& test,
                   double impairment) {
      SequenceRecord r;
      r.id = id;
      r.source = sid;
      r.path = root / (id + ".yuv");
      if (o.with_mos) r.mos = 100.0 - impairment;
      const Plane& y = test.front().planes[0];
      if (y.width() != o.width || y.height() != o.height) {
        r.resample = std::make_pair(y.width(), y.height());
      }
      write_raw_yuv(r.path, test, 8);
      m.sequences.push_back(r);
    };
    if (o.hidden_reference) add(sid + "_ref", frames, 0.0);
    for (Degradation d : o.degradations) {
      for (int level = 0; level < kDegradationLevels; ++level) {
        std::vector<Frame> test;
        for (std::size_t t = 0; t < frames.size(); ++t) {
          test.push_back(degrade(frames[t], d, level,
                                 static_cast<std::uint64_t>(s) * 131 + t * 17 +
                                     static_cast<std::uint64_t>(level)));
        }
        add(sid + "_" + degradation_name(d) + std::to_string(level), test,
            ground_truth_impairment(d, level));
      }
    }
  }
  const fs::path manifest = root / "manifest.json";
  m.save(manifest);
  return DatabaseManifest::load(manifest);
}

}  // namespace evmaf::synth
