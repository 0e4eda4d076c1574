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

#include "evmaf/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "evmaf/eadm.hpp"
#include "evmaf/error.hpp"

namespace evmaf {

namespace fn = feature_names;

// ---------------------------------------------------------------------------
// Keys and vectors

namespace {

constexpr std::string_view kDeltaPrefix = "\xCE\x94";
constexpr std::string_view kDeltaAscii = "Delta";

const std::vector<std::string_view>& known_names() {
  static const std::vector<std::string_view> names = {
      fn::kPsnr, fn::kSsim,    fn::kMsSsim,  fn::kVif,     fn::kBl,
      fn::kEd,   fn::kSi,      fn::kCf,      fn::kTp,      fn::kTi,
      fn::kLuma, fn::kDeltaSi, fn::kDeltaCf, fn::kDeltaTi, fn::kDeltaTp,
      fn::kEadm, fn::kAdm};
  return names;
}

Channel parse_channel(std::string_view s, std::string_view whole) {
  if (s == "Y") return Channel::kY;
  if (s == "Cb") return Channel::kCb;
  if (s == "Cr") return Channel::kCr;
  throw InputError("feature key '" + std::string(whole) +
                   "': unknown channel '" + std::string(s) + "'");
}

}  // namespace

bool FeatureKey::whole_frame() const {
  return name == fn::kEadm || name == fn::kAdm;
}

std::string FeatureKey::to_string() const {
  if (whole_frame()) return name;
  return name + "-" + channel_name(channel) + "-S" + std::to_string(scale);
}

FeatureKey FeatureKey::parse(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  if (s == fn::kEadm || s == fn::kAdm) return FeatureKey{s, Channel::kY, 1};
  const auto last = s.rfind('-');
  if (last == std::string::npos || last == 0) {
    throw InputError("feature key '" + s + "' is not NAME-channel-Sscale");
  }
  const auto mid = s.rfind('-', last - 1);
  if (mid == std::string::npos) {
    throw InputError("feature key '" + s + "' is not NAME-channel-Sscale");
  }
  std::string name = s.substr(0, mid);
  const std::string channel = s.substr(mid + 1, last - mid - 1);
  const std::string scale = s.substr(last + 1);
  if (name.rfind(kDeltaAscii, 0) == 0) {
    name = std::string(kDeltaPrefix) + name.substr(kDeltaAscii.size());
  }
  if (std::find(known_names().begin(), known_names().end(), name) ==
          known_names().end() ||
      name == fn::kEadm || name == fn::kAdm) {
    throw InputError("feature key '" + s + "': unknown feature '" + name + "'");
  }
  if (scale.size() != 2 || scale[0] != 'S' || scale[1] < '1' ||
      scale[1] > '0' + kNumScales) {
    throw InputError("feature key '" + s + "': scale must be S1..S4");
  }
  return FeatureKey{name, parse_channel(channel, s), scale[1] - '0'};
}

std::vector<std::string> render_keys(const std::vector<FeatureKey>& keys) {
  std::vector<std::string> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back(k.to_string());
  return out;
}

std::vector<FeatureKey> parse_keys(const std::vector<std::string>& texts) {
  std::vector<FeatureKey> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(FeatureKey::parse(t));
  return out;
}

std::optional<double> FeatureVector::find(const FeatureKey& key) const {
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) return values[i];
  }
  return std::nullopt;
}

double FeatureVector::at(const FeatureKey& key) const {
  const auto v = find(key);
  if (!v) throw InputError("missing feature " + key.to_string());
  return *v;
}

void FeatureVector::set(const FeatureKey& key, double value) {
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) {
      values[i] = value;
      return;
    }
  }
  keys.push_back(key);
  values.push_back(value);
}

FeatureVector aggregate_mean(const std::vector<FeatureVector>& frames) {
  if (frames.empty()) throw InputError("aggregate_mean: no frames");
  FeatureVector out;
  out.frame_index = 0;
  out.keys = frames.front().keys;
  out.values.assign(out.keys.size(), 0.0);
  for (const auto& f : frames) {
    if (f.keys != out.keys) {
      throw InputError("aggregate_mean: frames disagree on key order");
    }
    for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] += f.values[i];
  }
  for (auto& v : out.values) v /= static_cast<double>(frames.size());
  return out;
}

// ---------------------------------------------------------------------------
// Pool specification

std::vector<FeatureKey> vmaf_seed_keys() {
  return {
      {std::string(fn::kEadm), Channel::kY, 1},
      {std::string(fn::kTi), Channel::kY, 3},
      {std::string(fn::kVif), Channel::kY, 1},
      {std::string(fn::kVif), Channel::kY, 2},
      {std::string(fn::kVif), Channel::kY, 3},
      {std::string(fn::kVif), Channel::kY, 4},
  };
}

std::vector<FeatureKey> candidate_pool_keys() {
  const auto seeds = vmaf_seed_keys();
  auto is_seed = [&](const FeatureKey& k) {
    return std::find(seeds.begin(), seeds.end(), k) != seeds.end();
  };
  std::vector<FeatureKey> out;
  const std::vector<std::string_view> grid_names = {
      fn::kPsnr, fn::kSsim, fn::kMsSsim,  fn::kVif,     fn::kBl,
      fn::kEd,   fn::kSi,   fn::kCf,      fn::kTp,      fn::kDeltaSi,
      fn::kDeltaCf, fn::kDeltaTi, fn::kDeltaTp, fn::kTi};
  for (auto name : grid_names) {
    for (Channel c : kAllChannels) {
      for (int s = 1; s <= kNumScales; ++s) {
        FeatureKey k{std::string(name), c, s};
        if (!is_seed(k)) out.push_back(std::move(k));
      }
    }
  }
  out.push_back({std::string(fn::kLuma), Channel::kY, 1});
  out.push_back({std::string(fn::kLuma), Channel::kY, 4});
  return out;
}

PoolSpec full_pool_spec() {
  PoolSpec spec;
  spec.version = kPoolSpecVersion;
  spec.keys = vmaf_seed_keys();
  const auto pool = candidate_pool_keys();
  spec.keys.insert(spec.keys.end(), pool.begin(), pool.end());
  return spec;
}

PoolSpec PoolSpec::parse(std::string_view text) {
  PoolSpec spec;
  bool have_version = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') continue;
    if (!have_version) {
      if (line.rfind("version ", 0) != 0) {
        throw MalformedInputError("pool spec must start with 'version <n>'");
      }
      spec.version = std::stoi(line.substr(8));
      have_version = true;
      continue;
    }
    FeatureKey key = FeatureKey::parse(line);
    if (spec.contains(key)) {
      throw MalformedInputError("pool spec lists " + key.to_string() + " twice");
    }
    spec.keys.push_back(std::move(key));
  }
  if (!have_version) throw MalformedInputError("pool spec has no version line");
  if (spec.keys.empty()) throw MalformedInputError("pool spec lists no features");
  return spec;
}

PoolSpec PoolSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read pool spec " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string PoolSpec::serialize() const {
  std::ostringstream out;
  out << "# evmaf feature pool\n";
  out << "version " << version << "\n";
  for (const auto& k : keys) out << k.to_string() << "\n";
  return out.str();
}

void PoolSpec::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write pool spec " + path.string());
  out << serialize();
}

bool PoolSpec::contains(const FeatureKey& key) const {
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

// ---------------------------------------------------------------------------
// Plane-level kernels

namespace {

constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;
constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001,
                                                  0.2363, 0.1333};
constexpr double kVifNoiseVar = 2.0;  // in 8-bit code units squared
constexpr double kVifEps = 1e-10;
constexpr double kColorfulnessMeanWeight = 0.3;

void require_same(const Plane& a, const Plane& b, const char* what) {
  if (!a.same_geometry(b)) {
    throw DimensionError(std::string(what) + ": planes differ in geometry");
  }
}

Plane product(const Plane& a, const Plane& b) {
  Plane out(a.width(), a.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = a.values()[i] * b.values()[i];
  }
  return out;
}

struct LocalMoments {
  Plane mu1, mu2, s11, s22, s12;
};

LocalMoments local_moments(const Plane& x, const Plane& y,
                           std::span<const double> kernel) {
  LocalMoments m;
  m.mu1 = filter_separable(x, kernel);
  m.mu2 = filter_separable(y, kernel);
  m.s11 = filter_separable(product(x, x), kernel);
  m.s22 = filter_separable(product(y, y), kernel);
  m.s12 = filter_separable(product(x, y), kernel);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = m.mu1.values()[i];
    const double b = m.mu2.values()[i];
    m.s11.values()[i] -= a * a;
    m.s22.values()[i] -= b * b;
    m.s12.values()[i] -= a * b;
  }
  return m;
}

const std::vector<double>& ssim_kernel() {
  static const std::vector<double> k = gaussian_kernel(kSsimWindow, kSsimSigma);
  return k;
}

struct SsimMeans {
  double ssim = 0.0;
  double cs = 0.0;
};

SsimMeans ssim_means(const Plane& x, const Plane& y) {
  const LocalMoments m = local_moments(x, y, ssim_kernel());
  const double c1 = kSsimK1 * kSsimK1;
  const double c2 = kSsimK2 * kSsimK2;
  double ssim_sum = 0.0;
  double cs_sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = m.mu1.values()[i];
    const double b = m.mu2.values()[i];
    const double cs = (2.0 * m.s12.values()[i] + c2) /
                      (m.s11.values()[i] + m.s22.values()[i] + c2);
    const double l = (2.0 * a * b + c1) / (a * a + b * b + c1);
    ssim_sum += l * cs;
    cs_sum += cs;
  }
  const double n = static_cast<double>(x.size());
  return {ssim_sum / n, cs_sum / n};
}

Plane sobel_magnitude(const Plane& p) {
  const int w = p.width();
  const int h = p.height();
  Plane out(w, h);
  auto at = [&](int x, int y) {
    return p(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
      out(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

}  // namespace

double psnr(const Plane& ref, const Plane& test) {
  require_same(ref, test, "psnr");
  double sse = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref.values()[i] - test.values()[i];
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(ref.size());
  if (mse < 1e-6) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Plane& ref, const Plane& test) {
  require_same(ref, test, "ssim");
  return ssim_means(ref, test).ssim;
}

double ms_ssim(const Plane& ref, const Plane& test) {
  require_same(ref, test, "ms_ssim");
  if (ref.width() < 32 || ref.height() < 32) {
    std::ostringstream why;
    why << "ms_ssim: " << ref.width() << "x" << ref.height()
        << " plane too small, need at least 32x32";
    throw DimensionError(why.str());
  }
  Plane x = ref;
  Plane y = test;
  double result = 1.0;
  const int levels = static_cast<int>(kMsSsimWeights.size());
  for (int j = 0; j < levels; ++j) {
    const SsimMeans m = ssim_means(x, y);
    const double term = j + 1 < levels ? m.cs : m.ssim;
    // Negative structure terms are clamped so fractional exponents stay real.
    result *= std::pow(std::max(term, 0.0), kMsSsimWeights[j]);
    if (j + 1 < levels) {
      x = downsample_2x2(x);
      y = downsample_2x2(y);
    }
  }
  return result;
}

double vif(const Plane& ref, const Plane& test, int scale) {
  require_same(ref, test, "vif");
  if (scale < 1 || scale > kNumScales) throw OutOfRangeError("vif: scale");
  const int n = (1 << (5 - scale)) + 1;
  const auto kernel = gaussian_kernel(n, n / 5.0);
  Plane x = ref;
  Plane y = test;
  for (auto& v : x.values()) v *= 255.0;
  for (auto& v : y.values()) v *= 255.0;
  const LocalMoments m = local_moments(x, y, kernel);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s1 = m.s11.values()[i];
    const double s2 = std::max(m.s22.values()[i], 0.0);
    const double s12 = m.s12.values()[i];
    if (s1 < kVifEps) {
      // No reference information here; contributes to neither sum.
      continue;
    }
    double g = s12 / s1;
    double sv = s2 - g * s12;
    if (s2 < kVifEps) {
      g = 0.0;
      sv = 0.0;
    }
    if (g < 0.0) {
      sv = s2;
      g = 0.0;
    }
    sv = std::max(sv, 0.0);
    num += std::log2(1.0 + g * g * s1 / (sv + kVifNoiseVar));
    den += std::log2(1.0 + s1 / kVifNoiseVar);
  }
  return den > 0.0 ? num / den : 1.0;
}

double temporal_information(const Plane& curr, const Plane& prev) {
  require_same(curr, prev, "temporal_information");
  double acc = 0.0;
  for (std::size_t i = 0; i < curr.size(); ++i) {
    acc += std::abs(curr.values()[i] - prev.values()[i]);
  }
  return acc / static_cast<double>(curr.size());
}

double spatial_information(const Plane& plane) {
  return std::sqrt(variance(sobel_magnitude(plane)));
}

double colorfulness(const Plane& plane) {
  return std::sqrt(variance(plane)) +
         kColorfulnessMeanWeight * std::abs(mean(plane) - 0.5);
}

double temporal_perceptual(const Plane& curr, const Plane& prev,
                           const FlowField& flow) {
  require_same(curr, prev, "temporal_perceptual");
  const Plane compensated = displaced_frame(prev, flow);
  double acc = 0.0;
  for (std::size_t i = 0; i < curr.size(); ++i) {
    const double d = curr.values()[i] - compensated.values()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(curr.size());
}

double temporal_perceptual(const Plane& curr, const Plane& prev) {
  return temporal_perceptual(curr, prev, lucas_kanade_flow(prev, curr));
}

BlurEdge blur_edge(const Plane& ref, const Plane& test) {
  require_same(ref, test, "blur_edge");
  const DwtLevel o = dwt2d_level(ref, WaveletFamily::kHaar);
  const DwtLevel t = dwt2d_level(test, WaveletFamily::kHaar);
  BlurEdge out;
  for (std::size_t i = 0; i < o.approx.size(); ++i) {
    const double so = std::abs(o.detail_h.values()[i]) +
                      std::abs(o.detail_v.values()[i]) +
                      std::abs(o.detail_d.values()[i]);
    const double st = std::abs(t.detail_h.values()[i]) +
                      std::abs(t.detail_v.values()[i]) +
                      std::abs(t.detail_d.values()[i]);
    out.bl += std::max(so - st, 0.0);
    out.ed += std::max(st - so, 0.0);
  }
  const double n = static_cast<double>(o.approx.size());
  out.bl /= n;
  out.ed /= n;
  return out;
}

ContentFeatures compute_content_features(const Plane& frame,
                                         const Plane* prev) {
  ContentFeatures f;
  f.si = spatial_information(frame);
  f.cf = colorfulness(frame);
  f.tp = prev != nullptr ? temporal_perceptual(frame, *prev) : 0.0;
  f.luma = mean(frame);
  return f;
}

// ---------------------------------------------------------------------------
// Frame analysis

FrameAnalysis::FrameAnalysis(FramePair pair,
                             std::shared_ptr<FrameAnalysis> previous)
    : pair_(std::move(pair)), previous_(std::move(previous)) {}

void FrameAnalysis::check_scale(int scale) const {
  if (scale < 1 || scale > kNumScales) {
    throw OutOfRangeError("scale " + std::to_string(scale) + " outside 1..4");
  }
}

const Plane& FrameAnalysis::plane(Side side, Channel c, int scale) {
  check_scale(scale);
  auto& pyr = pyramids_[static_cast<int>(side) * 3 + static_cast<int>(c)];
  if (pyr.empty()) {
    const auto& planes = side == Side::kRef ? pair_.ref : pair_.test;
    const Plane& luma = planes[0];
    const Plane& src = planes[static_cast<int>(c)];
    pyr = build_scale_pyramid(
        c == Channel::kY ? src : full_geometry(src, luma.width(), luma.height()),
        kNumScales);
  }
  return pyr[static_cast<std::size_t>(scale - 1)];
}

const FlowField* FrameAnalysis::flow(Side side, Channel c, int scale) {
  if (!previous_) return nullptr;
  auto& f = flows_[slot(side, c, scale)];
  if (!f) f = lucas_kanade_flow(previous_->plane(side, c, scale), plane(side, c, scale));
  return &*f;
}

double FrameAnalysis::spatial_information(Side side, Channel c, int scale) {
  auto& v = si_[slot(side, c, scale)];
  if (!v) v = evmaf::spatial_information(plane(side, c, scale));
  return *v;
}

double FrameAnalysis::colorfulness(Side side, Channel c, int scale) {
  auto& v = cf_[slot(side, c, scale)];
  if (!v) v = evmaf::colorfulness(plane(side, c, scale));
  return *v;
}

double FrameAnalysis::temporal_information(Side side, Channel c, int scale) {
  auto& v = ti_[slot(side, c, scale)];
  if (!v) {
    v = previous_ ? evmaf::temporal_information(plane(side, c, scale),
                                                previous_->plane(side, c, scale))
                  : 0.0;
  }
  return *v;
}

double FrameAnalysis::temporal_perceptual(Side side, Channel c, int scale) {
  auto& v = tp_[slot(side, c, scale)];
  if (!v) {
    v = previous_ ? evmaf::temporal_perceptual(plane(side, c, scale),
                                               previous_->plane(side, c, scale),
                                               *flow(side, c, scale))
                  : 0.0;
  }
  return *v;
}

// ---------------------------------------------------------------------------
// Pair-level operations

namespace {

Plane pair_plane(const FramePair& pair, bool ref, Channel c, int scale) {
  if (scale < 1 || scale > kNumScales) throw OutOfRangeError("scale outside 1..4");
  const auto& planes = ref ? pair.ref : pair.test;
  const Plane& luma = planes[0];
  const Plane base = c == Channel::kY
                         ? planes[0]
                         : full_geometry(planes[static_cast<int>(c)],
                                         luma.width(), luma.height());
  return build_scale_pyramid(base, scale).back();
}

}  // namespace

double compute_psnr(const FramePair& pair, Channel c, int scale) {
  return psnr(pair_plane(pair, true, c, scale), pair_plane(pair, false, c, scale));
}

double compute_ssim(const FramePair& pair, Channel c, int scale,
                    SsimMode mode) {
  const Plane r = pair_plane(pair, true, c, scale);
  const Plane t = pair_plane(pair, false, c, scale);
  return mode == SsimMode::kSingle ? ssim(r, t) : ms_ssim(r, t);
}

double compute_vif_scale(const FramePair& pair, Channel c, int scale) {
  return vif(pair_plane(pair, true, c, scale), pair_plane(pair, false, c, scale),
             scale);
}

double compute_ti(const Plane& curr, const Plane* prev) {
  return prev != nullptr ? temporal_information(curr, *prev) : 0.0;
}

BlurEdge compute_bl_ed(const FramePair& pair, Channel c, int scale) {
  return blur_edge(pair_plane(pair, true, c, scale),
                   pair_plane(pair, false, c, scale));
}

double compute_delta_features(const Plane& ref_frame, const Plane& test_frame,
                              const Plane* prev_ref, const Plane* prev_test,
                              DeltaFeature which) {
  const bool temporal = which == DeltaFeature::kTi || which == DeltaFeature::kTp;
  if (temporal && ((prev_ref == nullptr) != (prev_test == nullptr))) {
    throw InputError("delta feature: previous frame given for one side only");
  }
  switch (which) {
    case DeltaFeature::kSi:
      return spatial_information(test_frame) - spatial_information(ref_frame);
    case DeltaFeature::kCf:
      return colorfulness(test_frame) - colorfulness(ref_frame);
    case DeltaFeature::kTi:
      return compute_ti(test_frame, prev_test) - compute_ti(ref_frame, prev_ref);
    case DeltaFeature::kTp:
      if (prev_ref == nullptr) return 0.0;
      return temporal_perceptual(test_frame, *prev_test) -
             temporal_perceptual(ref_frame, *prev_ref);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Extraction

FeatureVector extract_feature_vector(FrameAnalysis& a, const PoolSpec& pool,
                                     const ExtractOptions& options) {
  using Side = FrameAnalysis::Side;
  FeatureVector out;
  out.frame_index = a.pair().frame_index;
  out.keys = pool.keys;
  out.values.reserve(pool.keys.size());

  std::map<std::pair<int, int>, BlurEdge> bl_ed_cache;
  auto bl_ed = [&](Channel c, int s) -> const BlurEdge& {
    const auto k = std::make_pair(static_cast<int>(c), s);
    auto it = bl_ed_cache.find(k);
    if (it == bl_ed_cache.end()) {
      it = bl_ed_cache
               .emplace(k, blur_edge(a.plane(Side::kRef, c, s),
                                     a.plane(Side::kTest, c, s)))
               .first;
    }
    return it->second;
  };

  for (const auto& key : pool.keys) {
    const Channel c = key.channel;
    const int s = key.scale;
    const std::string& n = key.name;
    double v = 0.0;
    if (n == fn::kEadm) {
      const Plane& ref = a.plane(Side::kRef, Channel::kY, 1);
      const FlowField* flow = a.flow(Side::kRef, Channel::kY, 1);
      const DtfPyramid dtf =
          flow != nullptr
              ? compute_dtf(ref, a.previous()->pair().ref_plane(Channel::kY),
                            *flow, options.alpha)
              : compute_dtf(ref, nullptr, options.alpha);
      v = adm_detail_loss(ref, a.plane(Side::kTest, Channel::kY, 1), &dtf).score;
    } else if (n == fn::kAdm) {
      v = compute_adm(a.plane(Side::kRef, Channel::kY, 1),
                      a.plane(Side::kTest, Channel::kY, 1));
    } else if (n == fn::kPsnr) {
      v = psnr(a.plane(Side::kRef, c, s), a.plane(Side::kTest, c, s));
    } else if (n == fn::kSsim) {
      v = ssim(a.plane(Side::kRef, c, s), a.plane(Side::kTest, c, s));
    } else if (n == fn::kMsSsim) {
      v = ms_ssim(a.plane(Side::kRef, c, s), a.plane(Side::kTest, c, s));
    } else if (n == fn::kVif) {
      v = vif(a.plane(Side::kRef, c, s), a.plane(Side::kTest, c, s), s);
    } else if (n == fn::kBl) {
      v = bl_ed(c, s).bl;
    } else if (n == fn::kEd) {
      v = bl_ed(c, s).ed;
    } else if (n == fn::kSi) {
      v = a.spatial_information(Side::kRef, c, s);
    } else if (n == fn::kCf) {
      v = a.colorfulness(Side::kRef, c, s);
    } else if (n == fn::kTp) {
      v = a.temporal_perceptual(Side::kRef, c, s);
    } else if (n == fn::kTi) {
      v = a.temporal_information(Side::kRef, c, s);
    } else if (n == fn::kLuma) {
      v = mean(a.plane(Side::kRef, c, s));
    } else if (n == fn::kDeltaSi) {
      v = a.spatial_information(Side::kTest, c, s) -
          a.spatial_information(Side::kRef, c, s);
    } else if (n == fn::kDeltaCf) {
      v = a.colorfulness(Side::kTest, c, s) - a.colorfulness(Side::kRef, c, s);
    } else if (n == fn::kDeltaTi) {
      v = a.temporal_information(Side::kTest, c, s) -
          a.temporal_information(Side::kRef, c, s);
    } else if (n == fn::kDeltaTp) {
      v = a.temporal_perceptual(Side::kTest, c, s) -
          a.temporal_perceptual(Side::kRef, c, s);
    } else {
      throw InputError("no extractor for feature " + key.to_string());
    }
    if (!std::isfinite(v)) {
      throw ComputationError("feature " + key.to_string() + " is not finite on frame " +
                             std::to_string(out.frame_index));
    }
    out.values.push_back(v);
  }
  return out;
}

FeatureVector extract_feature_vector(const FramePair& pair,
                                     const FramePair* prev_pair,
                                     const PoolSpec& pool,
                                     const ExtractOptions& options) {
  std::shared_ptr<FrameAnalysis> prev;
  if (prev_pair != nullptr) prev = std::make_shared<FrameAnalysis>(*prev_pair);
  FrameAnalysis analysis(pair, prev);
  return extract_feature_vector(analysis, pool, options);
}

FeatureExtractor::FeatureExtractor(PoolSpec pool, ExtractOptions options)
    : pool_(std::move(pool)), options_(options) {}

FeatureVector FeatureExtractor::push(FramePair pair) {
  auto analysis = std::make_shared<FrameAnalysis>(std::move(pair), previous_);
  FeatureVector v = extract_feature_vector(*analysis, pool_, options_);
  analysis->release_previous();
  previous_ = std::move(analysis);
  return v;
}

}  // namespace evmaf
