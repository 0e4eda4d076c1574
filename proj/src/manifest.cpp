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

#include "evmaf/manifest.hpp"

#include <fstream>
#include <set>

#include "evmaf/error.hpp"

namespace evmaf {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path raw(p);
  return raw.is_absolute() ? raw : (base / raw).lexically_normal();
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  const fs::path rel = p.lexically_relative(base);
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

}  // namespace

DatabaseManifest DatabaseManifest::from_json(const json& j,
                                             const fs::path& base_dir) {
  DatabaseManifest m;
  try {
    if (j.value("schema", std::string()) != kManifestSchema) {
      throw MalformedInputError("manifest: schema must be \"evmaf-manifest\"");
    }
    const int version = j.at("schema_version").get<int>();
    if (version != kManifestSchemaVersion) {
      throw VersionError("manifest schema_version " + std::to_string(version) +
                         " is not supported (expected " +
                         std::to_string(kManifestSchemaVersion) + ")");
    }
    m.database = j.at("database").get<std::string>();
    if (m.database.empty()) throw MalformedInputError("manifest: empty database id");
    if (j.contains("mos_scale")) {
      m.mos_min = j["mos_scale"].at("min").get<double>();
      m.mos_max = j["mos_scale"].at("max").get<double>();
    }
    if (!(m.mos_max > m.mos_min)) {
      throw MalformedInputError("manifest " + m.database +
                                ": mos_scale max must exceed min");
    }
    std::set<std::string> ids;
    for (const auto& s : j.at("sources")) {
      SourceRecord r;
      r.id = s.at("id").get<std::string>();
      r.path = resolve(base_dir, s.at("path").get<std::string>());
      r.spec.width = s.at("width").get<int>();
      r.spec.height = s.at("height").get<int>();
      r.spec.fps = s.value("fps", 25.0);
      r.spec.bit_depth = s.value("bit_depth", 8);
      r.spec.frame_count = s.at("frames").get<int>();
      r.spec.validate();
      if (!ids.insert(r.id).second) {
        throw MalformedInputError("manifest: duplicate source id " + r.id);
      }
      m.sources.push_back(std::move(r));
    }
    std::set<std::string> seq_ids;
    for (const auto& s : j.at("sequences")) {
      SequenceRecord r;
      r.id = s.at("id").get<std::string>();
      r.source = s.at("source").get<std::string>();
      r.path = resolve(base_dir, s.at("path").get<std::string>());
      if (s.contains("mos") && !s["mos"].is_null()) r.mos = s["mos"].get<double>();
      if (s.contains("resample")) {
        r.resample = std::make_pair(s["resample"].at("width").get<int>(),
                                    s["resample"].at("height").get<int>());
      }
      if (!ids.count(r.source)) {
        throw MalformedInputError("manifest: sequence " + r.id +
                                  " references unknown source " + r.source);
      }
      if (!seq_ids.insert(r.id).second) {
        throw MalformedInputError("manifest: duplicate sequence id " + r.id);
      }
      if (r.mos && (*r.mos < m.mos_min || *r.mos > m.mos_max)) {
        throw MalformedInputError("manifest: sequence " + r.id +
                                  " MOS outside mos_scale");
      }
      m.sequences.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw MalformedInputError(std::string("manifest: ") + e.what());
  }
  for (const auto& s : m.sequences) m.test_spec(s).validate();
  return m;
}

DatabaseManifest DatabaseManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw MalformedInputError("manifest " + path.string() + ": " + e.what());
  }
  DatabaseManifest m = from_json(j, path.parent_path());
  m.origin = path;
  return m;
}

json DatabaseManifest::to_json(const fs::path& base_dir) const {
  json j;
  j["schema"] = kManifestSchema;
  j["schema_version"] = kManifestSchemaVersion;
  j["database"] = database;
  j["mos_scale"] = {{"min", mos_min}, {"max", mos_max}};
  j["sources"] = json::array();
  for (const auto& s : sources) {
    j["sources"].push_back({{"id", s.id},
                            {"path", relative_to(s.path, base_dir)},
                            {"width", s.spec.width},
                            {"height", s.spec.height},
                            {"fps", s.spec.fps},
                            {"bit_depth", s.spec.bit_depth},
                            {"frames", s.spec.frame_count}});
  }
  j["sequences"] = json::array();
  for (const auto& s : sequences) {
    json r = {{"id", s.id},
              {"source", s.source},
              {"path", relative_to(s.path, base_dir)}};
    if (s.mos) r["mos"] = *s.mos;
    if (s.resample) {
      r["resample"] = {{"width", s.resample->first}, {"height", s.resample->second}};
    }
    j["sequences"].push_back(std::move(r));
  }
  return j;
}

void DatabaseManifest::save(const fs::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << to_json(path.parent_path()).dump(1) << "\n";
}

const SourceRecord& DatabaseManifest::source_of(const SequenceRecord& seq) const {
  for (const auto& s : sources) {
    if (s.id == seq.source) return s;
  }
  throw MalformedInputError("manifest: unknown source " + seq.source);
}

VideoSpec DatabaseManifest::test_spec(const SequenceRecord& seq) const {
  VideoSpec spec = source_of(seq).spec;
  if (seq.resample) {
    spec.width = seq.resample->first;
    spec.height = seq.resample->second;
  }
  return spec;
}

double DatabaseManifest::normalized_mos(const SequenceRecord& seq) const {
  if (!seq.mos) throw InputError("sequence " + seq.id + " has no MOS");
  return 100.0 * (*seq.mos - mos_min) / (mos_max - mos_min);
}

bool DatabaseManifest::has_all_mos() const {
  for (const auto& s : sequences) {
    if (!s.mos) return false;
  }
  return !sequences.empty();
}

}  // namespace evmaf
