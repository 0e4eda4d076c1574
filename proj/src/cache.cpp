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

#include "evmaf/cache.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "evmaf/error.hpp"

namespace evmaf {

namespace fs = std::filesystem;

void Fnv1a::add(std::string_view bytes) {
  for (unsigned char c : bytes) {
    h_ ^= c;
    h_ *= 1099511628211ull;
  }
}

void Fnv1a::add_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    add(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
}

std::string Fnv1a::hex() const {
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h_));
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path cache_path(const fs::path& cache_dir, const std::string& database,
                    const std::string& sequence) {
  return cache_dir / database / (sequence + ".csv");
}

std::string cache_key(const PoolSpec& pool, double alpha,
                      const DatabaseManifest& manifest,
                      const SequenceRecord& seq) {
  const SourceRecord& src = manifest.source_of(seq);
  const VideoSpec ts = manifest.test_spec(seq);
  Fnv1a h;
  std::ostringstream meta;
  meta << pool.serialize() << "|extractor=" << kExtractorVersion
       << "|alpha=" << format_double(alpha) << "|src=" << src.spec.width << "x"
       << src.spec.height << "@" << src.spec.bit_depth << "/"
       << src.spec.frame_count << "|test=" << ts.width << "x" << ts.height
       << "|resample=" << (seq.resample ? 1 : 0) << "|";
  h.add(meta.str());
  h.add_file(src.path);
  h.add("|");
  h.add_file(seq.path);
  return h.hex();
}

void write_cache(const fs::path& path, const CachedSequence& c) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write cache " + tmp.string());
    out << "# evmaf-cache key=" << c.key << " pool=" << c.pool_version
        << " extractor=" << c.extractor_version
        << " alpha=" << format_double(c.alpha) << "\n";
    out << "frame";
    for (const auto& k : c.keys) out << "," << k.to_string();
    out << "\n";
    for (const auto& f : c.frames) {
      out << f.frame_index;
      for (double v : f.values) out << "," << format_double(v);
      out << "\n";
    }
    if (!out) throw IoError("short write on cache " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string header_field(const std::string& header, const std::string& name) {
  for (const auto& tok : split(header, ' ')) {
    if (tok.rfind(name + "=", 0) == 0) return tok.substr(name.size() + 1);
  }
  throw MalformedInputError("cache header lacks " + name);
}

}  // namespace

CachedSequence read_cache(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read cache " + path.string());
  CachedSequence c;
  std::string header;
  std::getline(in, header);
  if (header.rfind("# evmaf-cache ", 0) != 0) {
    throw MalformedInputError(path.string() + ": not an evmaf cache file");
  }
  try {
    c.key = header_field(header, "key");
    c.pool_version = std::stoi(header_field(header, "pool"));
    c.extractor_version = std::stoi(header_field(header, "extractor"));
    c.alpha = std::stod(header_field(header, "alpha"));
    std::string cols;
    std::getline(in, cols);
    auto names = split(cols, ',');
    if (names.empty() || names.front() != "frame") {
      throw MalformedInputError(path.string() + ": missing column header");
    }
    names.erase(names.begin());
    c.keys = parse_keys(names);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split(line, ',');
      if (cells.size() != c.keys.size() + 1) {
        throw MalformedInputError(path.string() + ": ragged row");
      }
      FeatureVector f;
      f.frame_index = std::stoi(cells[0]);
      f.keys = c.keys;
      for (std::size_t i = 1; i < cells.size(); ++i) {
        const double v = std::stod(cells[i]);
        if (!std::isfinite(v)) {
          throw MalformedInputError(path.string() + ": non-finite value");
        }
        f.values.push_back(v);
      }
      c.frames.push_back(std::move(f));
    }
  } catch (const std::invalid_argument&) {
    throw MalformedInputError(path.string() + ": unparsable number");
  } catch (const std::out_of_range&) {
    throw MalformedInputError(path.string() + ": number out of range");
  }
  if (c.frames.empty()) throw MalformedInputError(path.string() + ": no rows");
  return c;
}

std::optional<CachedSequence> read_cache_if_valid(const fs::path& path,
                                                  const std::string& key) {
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("# evmaf-cache ", 0) != 0) return std::nullopt;
  try {
    if (header_field(header, "key") != key) return std::nullopt;
    return read_cache(path);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace evmaf
