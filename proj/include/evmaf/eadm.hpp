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
#include "evmaf/transforms.hpp"
#include "evmaf/video_io.hpp"

namespace evmaf {

inline constexpr int kAdmScales = 4;
inline constexpr double kDefaultAlpha = 0.3;

// Absolute displaced-frame difference of the reference luma, decomposed along
// the same CDF 9/7 approximation chain as ADM so that level l lines up with
// the level-l detail bands. Values are in 8-bit code units.
struct DtfPyramid {
  std::vector<Plane> levels;  // levels[l - 1] is DTF at scale l, all >= 0
  double alpha = kDefaultAlpha;

  bool all_zero() const;
};

// Per-level contrast-masking thresholds (one map per level, shared by the
// three orientations).
struct MaskingThresholds {
  std::vector<Plane> levels;
};

// DTF = |o - o_DF| with o_DF the previous reference frame motion-compensated
// onto the current one. Without a previous frame the pyramid is all zero.
DtfPyramid compute_dtf(const Plane& curr_ref, const Plane* prev_ref,
                       double alpha);
DtfPyramid compute_dtf(const Plane& curr_ref, const Plane& prev_ref,
                       const FlowField& flow, double alpha);

// MT / (1 + DTF)^alpha, elementwise per level.
MaskingThresholds modify_masking_thresholds(const MaskingThresholds& mt,
                                            const DtfPyramid& dtf);

struct AdmScore {
  double score = 1.0;
  double numerator = 0.0;
  double denominator = 0.0;
};

// Detail-loss ADM on luma planes in [0, 1]. With `dtf` the masking
// thresholds are relaxed to MT / (1 + DTF)^alpha; without it this is
// plain ADM.
AdmScore adm_detail_loss(const Plane& ref, const Plane& test,
                         const DtfPyramid* dtf = nullptr);

double compute_adm(const Plane& ref, const Plane& test);

// Enhanced ADM of a pair's luma. `prev_ref` may be null (first frame), in
// which case the result equals plain ADM.
double compute_eadm(const FramePair& pair, const Plane* prev_ref,
                    double alpha);

// Exposed for tests: the contrast-masking threshold maps ADM builds from the
// CSF-weighted additive-impairment bands.
MaskingThresholds adm_masking_thresholds(const Plane& ref, const Plane& test);

// CSF weight (inverse quantization step) for a level (1..4) and orientation
// (0 = H, 1 = V, 2 = D).
double adm_csf_weight(int level, int orientation);

}  // namespace evmaf
