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

// Database manifests: one JSON file per subjective database.
//
// {
//   "schema": "evmaf-manifest", "schema_version": 1,
//   "database": "train1",
//   "mos_scale": {"min": 1, "max": 5},
//   "sources": [{"id": "s0", "path": "s0.yuv", "width": 256, "height": 256,
//                "fps": 25, "bit_depth": 8, "frames": 3}],
//   "sequences": [{"id": "s0_blur1", "source": "s0", "path": "s0_blur1.yuv",
//                  "mos": 3.7, "resample": {"width": 128, "height": 128}}]
// }
//
// Paths are relative to the manifest file. "resample" marks test content
// stored at a lower resolution; it is upsampled bilinearly on read. "mos" may
// be omitted for prediction-only manifests.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "evmaf/video_io.hpp"

namespace evmaf {

inline constexpr const char* kManifestSchema = "evmaf-manifest";
inline constexpr int kManifestSchemaVersion = 1;

struct SourceRecord {
  std::string id;
  std::filesystem::path path;  // resolved
  VideoSpec spec;
};

struct SequenceRecord {
  std::string id;
  std::string source;
  std::filesystem::path path;  // resolved
  std::optional<double> mos;   // raw, on the manifest scale
  std::optional<std::pair<int, int>> resample;  // stored width, height
};

struct DatabaseManifest {
  std::string database;
  double mos_min = 0.0;
  double mos_max = 100.0;
  std::vector<SourceRecord> sources;
  std::vector<SequenceRecord> sequences;
  std::filesystem::path origin;

  static DatabaseManifest load(const std::filesystem::path& path);
  static DatabaseManifest from_json(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir);
  nlohmann::json to_json(const std::filesystem::path& base_dir) const;
  void save(const std::filesystem::path& path) const;

  const SourceRecord& source_of(const SequenceRecord& seq) const;
  VideoSpec test_spec(const SequenceRecord& seq) const;

  // MOS mapped to [0, 100] with the declared scale bounds.
  double normalized_mos(const SequenceRecord& seq) const;
  bool has_all_mos() const;
};

}  // namespace evmaf
