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
#include <compare>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evmaf/plane.hpp"
#include "evmaf/transforms.hpp"
#include "evmaf/video_io.hpp"

namespace evmaf {

inline constexpr int kNumScales = 4;
inline constexpr double kPsnrCapDb = 60.0;

// Feature names. Delta features carry a leading U+0394 in their canonical
// rendering; "Delta" is accepted as an ASCII spelling when parsing.
namespace feature_names {
inline constexpr std::string_view kPsnr = "PSNR";
inline constexpr std::string_view kSsim = "SSIM";
inline constexpr std::string_view kMsSsim = "MSSSIM";
inline constexpr std::string_view kVif = "VIF";
inline constexpr std::string_view kBl = "BL";
inline constexpr std::string_view kEd = "ED";
inline constexpr std::string_view kSi = "SI";
inline constexpr std::string_view kCf = "CF";
inline constexpr std::string_view kTp = "TP";
inline constexpr std::string_view kTi = "TI";
inline constexpr std::string_view kLuma = "LUMA";
inline constexpr std::string_view kDeltaSi = "\xCE\x94SI";
inline constexpr std::string_view kDeltaCf = "\xCE\x94" "CF";
inline constexpr std::string_view kDeltaTi = "\xCE\x94TI";
inline constexpr std::string_view kDeltaTp = "\xCE\x94TP";
inline constexpr std::string_view kEadm = "E-ADM";
inline constexpr std::string_view kAdm = "ADM";
}  // namespace feature_names

// (feature, channel, scale). Rendered as NAME-channel-S<scale>, except for
// the whole-frame ADM family which renders as the bare name.
struct FeatureKey {
  std::string name;
  Channel channel = Channel::kY;
  int scale = 1;

  bool whole_frame() const;
  std::string to_string() const;
  static FeatureKey parse(std::string_view text);

  friend bool operator==(const FeatureKey&, const FeatureKey&) = default;
  friend auto operator<=>(const FeatureKey& a, const FeatureKey& b) {
    return a.to_string() <=> b.to_string();
  }
};

std::vector<std::string> render_keys(const std::vector<FeatureKey>& keys);
std::vector<FeatureKey> parse_keys(const std::vector<std::string>& texts);

// Ordered key/value record for one frame (or one sequence once aggregated).
struct FeatureVector {
  int frame_index = 0;
  std::vector<FeatureKey> keys;
  std::vector<double> values;

  std::size_t size() const { return keys.size(); }
  std::optional<double> find(const FeatureKey& key) const;
  double at(const FeatureKey& key) const;  // InputError naming the key
  void set(const FeatureKey& key, double value);
};

// Mean over frames, key by key. All inputs must share the same key order.
FeatureVector aggregate_mean(const std::vector<FeatureVector>& frames);

// Versioned, ordered list of feature keys to extract.
struct PoolSpec {
  int version = 1;
  std::vector<FeatureKey> keys;

  static PoolSpec load(const std::filesystem::path& path);
  static PoolSpec parse(std::string_view text);
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;
  bool contains(const FeatureKey& key) const;
};

inline constexpr int kPoolSpecVersion = 1;

// The six original VMAF features with the enhanced ADM in place of ADM.
std::vector<FeatureKey> vmaf_seed_keys();

// The 165 new candidate features, in their canonical order.
std::vector<FeatureKey> candidate_pool_keys();

// Seed keys followed by the candidate pool.
PoolSpec full_pool_spec();

// ---------------------------------------------------------------------------
// Plane-level kernels. All planes are normalized intensities in [0, 1].

// 10 log10(1 / MSE), capped at kPsnrCapDb when MSE < 1e-6.
double psnr(const Plane& ref, const Plane& test);

// Mean SSIM map, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03.
double ssim(const Plane& ref, const Plane& test);

// Five-level MS-SSIM with the standard exponents. Requires >= 32x32.
double ms_ssim(const Plane& ref, const Plane& test);

// Pixel-domain VIF at pyramid scale `scale` (selects the window size).
double vif(const Plane& ref, const Plane& test, int scale);

double temporal_information(const Plane& curr, const Plane& prev);
double spatial_information(const Plane& plane);
double colorfulness(const Plane& plane);
double temporal_perceptual(const Plane& curr, const Plane& prev,
                           const FlowField& flow);
double temporal_perceptual(const Plane& curr, const Plane& prev);

struct BlurEdge {
  double bl = 0.0;
  double ed = 0.0;
};

// Per-pixel difference of summed absolute H/V/D Haar coefficients, clamped
// at zero in each direction and averaged.
BlurEdge blur_edge(const Plane& ref, const Plane& test);

struct ContentFeatures {
  double si = 0.0;
  double cf = 0.0;
  double tp = 0.0;
  double luma = 0.0;
};

// Reference-side content features; TP is 0 when there is no previous frame.
ContentFeatures compute_content_features(const Plane& frame,
                                         const Plane* prev);

// ---------------------------------------------------------------------------
// Frame-level analysis with per-frame caches of pyramids and flows.

class FrameAnalysis {
 public:
  enum class Side { kRef = 0, kTest = 1 };

  explicit FrameAnalysis(FramePair pair,
                         std::shared_ptr<FrameAnalysis> previous = nullptr);

  const FramePair& pair() const { return pair_; }
  const FrameAnalysis* previous() const { return previous_.get(); }

  // Plane at full luma geometry (chroma upsampled) and pyramid scale 1..4.
  const Plane& plane(Side side, Channel c, int scale);

  // Flow from the previous frame's plane to this one; nullptr on frame 0.
  const FlowField* flow(Side side, Channel c, int scale);

  double spatial_information(Side side, Channel c, int scale);
  double colorfulness(Side side, Channel c, int scale);
  double temporal_information(Side side, Channel c, int scale);
  double temporal_perceptual(Side side, Channel c, int scale);

  void release_previous() { previous_.reset(); }

 private:
  static int slot(Side side, Channel c, int scale) {
    return (static_cast<int>(side) * 3 + static_cast<int>(c)) * kNumScales +
           (scale - 1);
  }
  void check_scale(int scale) const;

  FramePair pair_;
  std::shared_ptr<FrameAnalysis> previous_;
  std::array<std::vector<Plane>, 6> pyramids_;
  std::array<std::optional<FlowField>, 24> flows_;
  std::array<std::optional<double>, 24> si_;
  std::array<std::optional<double>, 24> cf_;
  std::array<std::optional<double>, 24> ti_;
  std::array<std::optional<double>, 24> tp_;
};

double compute_psnr(const FramePair& pair, Channel c, int scale);

enum class SsimMode { kSingle, kMultiscale };
double compute_ssim(const FramePair& pair, Channel c, int scale,
                    SsimMode mode);
double compute_vif_scale(const FramePair& pair, Channel c, int scale);
double compute_ti(const Plane& curr, const Plane* prev);
BlurEdge compute_bl_ed(const FramePair& pair, Channel c, int scale);

enum class DeltaFeature { kSi, kCf, kTi, kTp };

// feature(test) - feature(reference), signed. The previous planes are only
// needed for the temporal features.
double compute_delta_features(const Plane& ref_frame, const Plane& test_frame,
                              const Plane* prev_ref, const Plane* prev_test,
                              DeltaFeature which);

struct ExtractOptions {
  double alpha = 0.3;  // E-ADM masking exponent
};

// Computes one value per key of `pool`. The previous analysis supplies the
// temporal context; pass nullptr for the first frame.
FeatureVector extract_feature_vector(FrameAnalysis& analysis,
                                     const PoolSpec& pool,
                                     const ExtractOptions& options);

FeatureVector extract_feature_vector(const FramePair& pair,
                                     const FramePair* prev_pair,
                                     const PoolSpec& pool,
                                     const ExtractOptions& options);

// Streams frames of one sequence, keeping only the previous frame alive.
class FeatureExtractor {
 public:
  FeatureExtractor(PoolSpec pool, ExtractOptions options);

  FeatureVector push(FramePair pair);

 private:
  PoolSpec pool_;
  ExtractOptions options_;
  std::shared_ptr<FrameAnalysis> previous_;
};

// Bumped whenever any extractor changes numerically; caches key on it.
inline constexpr int kExtractorVersion = 1;

}  // namespace evmaf
