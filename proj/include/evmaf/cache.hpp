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

// Per-sequence feature cache: <dir>/<database>/<sequence>.csv
//
//   # evmaf-cache key=<16 hex> pool=<v> extractor=<v> alpha=<a>
//   frame,<key 1>,<key 2>,...
//   0,<v>,<v>,...
//
// A cache file is valid only when its key matches the key recomputed from
// the pool, extractor version, alpha, manifest record and media bytes.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evmaf/features.hpp"
#include "evmaf/manifest.hpp"

namespace evmaf {

// 64-bit FNV-1a, incremental.
class Fnv1a {
 public:
  void add(std::string_view bytes);
  void add_file(const std::filesystem::path& path);
  std::uint64_t value() const { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 14695981039346656037ull;
};

struct CachedSequence {
  std::string key;
  int pool_version = 0;
  int extractor_version = 0;
  double alpha = 0.0;
  std::vector<FeatureKey> keys;
  std::vector<FeatureVector> frames;

  FeatureVector mean() const { return aggregate_mean(frames); }
};

std::filesystem::path cache_path(const std::filesystem::path& cache_dir,
                                 const std::string& database,
                                 const std::string& sequence);

std::string cache_key(const PoolSpec& pool, double alpha,
                      const DatabaseManifest& manifest,
                      const SequenceRecord& seq);

void write_cache(const std::filesystem::path& path, const CachedSequence& c);
CachedSequence read_cache(const std::filesystem::path& path);

// Reads the cache if present and its header key equals `key`.
std::optional<CachedSequence> read_cache_if_valid(const std::filesystem::path& path,
                                                  const std::string& key);

std::string format_double(double v);

}  // namespace evmaf
