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

#include "evmaf/eadm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "evmaf/error.hpp"

namespace evmaf {
namespace {

constexpr double kCodeScale = 255.0;
constexpr double kBorderFactor = 0.1;
constexpr double kDivEps = 1e-30;
// cos^2(1 degree): restored and test detail vectors closer than one degree
// are treated as pure detail (no additive impairment).
const double kCos1DegSq = std::pow(std::cos(std::numbers::pi / 180.0), 2.0);

// Watson et al. 9/7 basis-function amplitudes, rows = level, columns =
// orientation index theta in {LL, H, D, V}.
constexpr std::array<std::array<double, 4>, 4> kBasisAmplitude = {{
    {0.62171, 0.67234, 0.72709, 0.67234},
    {0.34537, 0.41317, 0.49428, 0.41317},
    {0.18004, 0.22727, 0.28688, 0.22727},
    {0.091401, 0.11792, 0.15214, 0.11792},
}};

// Luma quantization-threshold model.
constexpr double kModelA = 0.495;
constexpr double kModelK = 0.466;
constexpr double kModelF0 = 0.401;
constexpr std::array<double, 4> kModelG = {1.501, 1.0, 0.534, 1.0};

// Viewing distance of three picture heights on a 1080-line display.
constexpr double kViewDistance = 3.0;
constexpr double kDisplayHeight = 1080.0;

struct Bands {
  std::array<Plane, 3> b;  // H, V, D
};

Bands detail_bands(const DwtLevel& level) {
  return Bands{{level.detail_h, level.detail_v, level.detail_d}};
}

struct Region {
  int left, top, right, bottom;
  double area() const {
    return static_cast<double>(right - left) * static_cast<double>(bottom - top);
  }
};

Region center_region(int w, int h) {
  const int left = std::max(0, static_cast<int>(w * kBorderFactor - 0.5));
  const int top = std::max(0, static_cast<int>(h * kBorderFactor - 0.5));
  return Region{left, top, w - left, h - top};
}

Plane scaled_codes(const Plane& p) {
  Plane out = p;
  for (auto& v : out.values()) v *= kCodeScale;
  return out;
}

// Splits test detail into the part explained by attenuating the reference
// (restored) and the remainder (additive impairment).
void decouple(const Bands& ref, const Bands& test, Bands& restored,
              Bands& additive) {
  const int w = ref.b[0].width();
  const int h = ref.b[0].height();
  for (int t = 0; t < 3; ++t) {
    restored.b[t] = Plane(w, h);
    additive.b[t] = Plane(w, h);
  }
  for (std::size_t i = 0; i < ref.b[0].size(); ++i) {
    const double oh = ref.b[0].values()[i];
    const double ov = ref.b[1].values()[i];
    const double od = ref.b[2].values()[i];
    const double th = test.b[0].values()[i];
    const double tv = test.b[1].values()[i];
    const double td = test.b[2].values()[i];

    const double kh = std::clamp(th / (oh + kDivEps), 0.0, 1.0);
    const double kv = std::clamp(tv / (ov + kDivEps), 0.0, 1.0);
    const double kd = std::clamp(td / (od + kDivEps), 0.0, 1.0);
    double rh = kh * oh;
    double rv = kv * ov;
    double rd = kd * od;

    const double ot_dp = oh * th + ov * tv;
    const double o_mag_sq = oh * oh + ov * ov;
    const double t_mag_sq = th * th + tv * tv;
    if (ot_dp >= 0.0 && ot_dp * ot_dp >= kCos1DegSq * o_mag_sq * t_mag_sq) {
      rh = th;
      rv = tv;
      rd = td;
    }
    restored.b[0].values()[i] = rh;
    restored.b[1].values()[i] = rv;
    restored.b[2].values()[i] = rd;
    additive.b[0].values()[i] = th - rh;
    additive.b[1].values()[i] = tv - rv;
    additive.b[2].values()[i] = td - rd;
  }
}

void apply_csf(Bands& bands, int level) {
  for (int t = 0; t < 3; ++t) {
    const double w = adm_csf_weight(level, t);
    for (auto& v : bands.b[t].values()) v *= w;
  }
}

// Center pixel weighted 1/15, its eight neighbours 1/30, summed over the
// three orientations of the CSF-weighted additive impairment.
Plane masking_threshold(const Bands& additive_csf) {
  const int w = additive_csf.b[0].width();
  const int h = additive_csf.b[0].height();
  Plane mt(w, h);
  for (int t = 0; t < 3; ++t) {
    const Plane& a = additive_csf.b[t];
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double sum = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          const int yy = mirror_index(y + dy, h);
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = mirror_index(x + dx, w);
            const double weight = (dx == 0 && dy == 0) ? 1.0 / 15.0 : 1.0 / 30.0;
            sum += weight * std::abs(a(xx, yy));
          }
        }
        mt(x, y) += sum;
      }
    }
  }
  return mt;
}

double cube_sum(const Plane& p, const Region& r) {
  double acc = 0.0;
  for (int y = r.top; y < r.bottom; ++y) {
    for (int x = r.left; x < r.right; ++x) {
      const double v = std::abs(p(x, y));
      acc += v * v * v;
    }
  }
  return acc;
}

struct LevelTerms {
  Bands ref_csf;
  Bands restored_csf;
  Plane threshold;
};

LevelTerms level_terms(const DwtLevel& ref_level, const DwtLevel& test_level,
                       int level) {
  const Bands ref = detail_bands(ref_level);
  const Bands test = detail_bands(test_level);
  LevelTerms terms;
  Bands additive;
  decouple(ref, test, terms.restored_csf, additive);
  terms.ref_csf = ref;
  apply_csf(terms.ref_csf, level);
  apply_csf(terms.restored_csf, level);
  apply_csf(additive, level);
  terms.threshold = masking_threshold(additive);
  return terms;
}

}  // namespace

double adm_csf_weight(int level, int orientation) {
  if (level < 1 || level > kAdmScales || orientation < 0 || orientation > 2) {
    throw OutOfRangeError("adm_csf_weight: level/orientation out of range");
  }
  // H -> theta 1, V -> theta 3, D -> theta 2.
  static constexpr std::array<int, 3> kTheta = {1, 3, 2};
  const int theta = kTheta[orientation];
  const int lambda = level - 1;
  const double r = kViewDistance * kDisplayHeight * std::numbers::pi / 180.0;
  const double f = std::pow(2.0, lambda + 1) * kModelF0 * kModelG[theta] / r;
  const double temp = std::log10(f);
  const double q = 2.0 * kModelA * std::pow(10.0, kModelK * temp * temp) /
                   kBasisAmplitude[lambda][theta];
  return 1.0 / q;
}

bool DtfPyramid::all_zero() const {
  for (const auto& p : levels) {
    for (double v : p.values()) {
      if (v != 0.0) return false;
    }
  }
  return true;
}

namespace {

DtfPyramid decompose_dtf(Plane dtf, double alpha) {
  DtfPyramid out;
  out.alpha = alpha;
  const int levels = std::min(
      kAdmScales,
      static_cast<int>(std::floor(std::log2(std::min(dtf.width(), dtf.height())))));
  Plane current = std::move(dtf);
  double gain = 1.0;
  for (int l = 1; l <= levels; ++l) {
    Plane approx = dwt2d_level(current, WaveletFamily::kCdf97).approx;
    gain *= 2.0;  // 2-D low-pass DC gain per level
    Plane level(approx.width(), approx.height());
    for (std::size_t i = 0; i < approx.size(); ++i) {
      level.values()[i] = std::abs(approx.values()[i]) / gain;
    }
    out.levels.push_back(std::move(level));
    current = std::move(approx);
  }
  return out;
}

}  // namespace

DtfPyramid compute_dtf(const Plane& curr_ref, const Plane& prev_ref,
                       const FlowField& flow, double alpha) {
  if (!curr_ref.same_geometry(prev_ref)) {
    throw DimensionError("compute_dtf: frames differ in geometry");
  }
  const Plane compensated = displaced_frame(prev_ref, flow);
  Plane dtf(curr_ref.width(), curr_ref.height());
  for (std::size_t i = 0; i < dtf.size(); ++i) {
    dtf.values()[i] =
        kCodeScale * std::abs(curr_ref.values()[i] - compensated.values()[i]);
  }
  return decompose_dtf(std::move(dtf), alpha);
}

DtfPyramid compute_dtf(const Plane& curr_ref, const Plane* prev_ref,
                       double alpha) {
  if (prev_ref == nullptr) {
    return decompose_dtf(Plane(curr_ref.width(), curr_ref.height()), alpha);
  }
  const FlowField flow = lucas_kanade_flow(*prev_ref, curr_ref);
  return compute_dtf(curr_ref, *prev_ref, flow, alpha);
}

MaskingThresholds modify_masking_thresholds(const MaskingThresholds& mt,
                                            const DtfPyramid& dtf) {
  if (mt.levels.size() > dtf.levels.size()) {
    throw DimensionError("modify_masking_thresholds: DTF has too few levels");
  }
  MaskingThresholds out;
  for (std::size_t l = 0; l < mt.levels.size(); ++l) {
    const Plane& t = mt.levels[l];
    const Plane& d = dtf.levels[l];
    if (!t.same_geometry(d)) {
      throw DimensionError("modify_masking_thresholds: level geometry mismatch");
    }
    Plane level(t.width(), t.height());
    for (std::size_t i = 0; i < t.size(); ++i) {
      level.values()[i] = t.values()[i] / std::pow(1.0 + d.values()[i], dtf.alpha);
    }
    out.levels.push_back(std::move(level));
  }
  return out;
}

MaskingThresholds adm_masking_thresholds(const Plane& ref, const Plane& test) {
  const auto ref_levels = dwt2d(scaled_codes(ref), kAdmScales, WaveletFamily::kCdf97);
  const auto test_levels = dwt2d(scaled_codes(test), kAdmScales, WaveletFamily::kCdf97);
  MaskingThresholds mt;
  for (int l = 0; l < kAdmScales; ++l) {
    mt.levels.push_back(level_terms(ref_levels[l], test_levels[l], l + 1).threshold);
  }
  return mt;
}

AdmScore adm_detail_loss(const Plane& ref, const Plane& test,
                         const DtfPyramid* dtf) {
  if (!ref.same_geometry(test)) {
    throw DimensionError("adm: reference and test differ in geometry");
  }
  const auto ref_levels = dwt2d(scaled_codes(ref), kAdmScales, WaveletFamily::kCdf97);
  const auto test_levels = dwt2d(scaled_codes(test), kAdmScales, WaveletFamily::kCdf97);
  if (dtf != nullptr && dtf->levels.size() < static_cast<std::size_t>(kAdmScales)) {
    throw DimensionError("adm: DTF pyramid has too few levels");
  }

  AdmScore out;
  for (int l = 0; l < kAdmScales; ++l) {
    LevelTerms terms = level_terms(ref_levels[l], test_levels[l], l + 1);
    if (dtf != nullptr) {
      MaskingThresholds mt;
      mt.levels.push_back(std::move(terms.threshold));
      DtfPyramid single;
      single.alpha = dtf->alpha;
      single.levels.push_back(dtf->levels[l]);
      terms.threshold = modify_masking_thresholds(mt, single).levels.front();
    }
    const Plane& thr = terms.threshold;
    const Region region = center_region(thr.width(), thr.height());
    const double area_term = std::cbrt(region.area() / 32.0);
    for (int t = 0; t < 3; ++t) {
      Plane masked(thr.width(), thr.height());
      const auto& r = terms.restored_csf.b[t];
      for (std::size_t i = 0; i < masked.size(); ++i) {
        masked.values()[i] =
            std::max(std::abs(r.values()[i]) - thr.values()[i], 0.0);
      }
      out.numerator += std::cbrt(cube_sum(masked, region)) + area_term;
      out.denominator += std::cbrt(cube_sum(terms.ref_csf.b[t], region)) + area_term;
    }
  }
  out.score = out.denominator > 0.0 ? out.numerator / out.denominator : 1.0;
  return out;
}

double compute_adm(const Plane& ref, const Plane& test) {
  return adm_detail_loss(ref, test, nullptr).score;
}

double compute_eadm(const FramePair& pair, const Plane* prev_ref,
                    double alpha) {
  const Plane& ref = pair.ref_plane(Channel::kY);
  const Plane& test = pair.test_plane(Channel::kY);
  const DtfPyramid dtf = compute_dtf(ref, prev_ref, alpha);
  return adm_detail_loss(ref, test, &dtf).score;
}

}  // namespace evmaf
