// Copyright 2026 The labelfuse4d Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "labelfuse4d/manifest.hpp"

#include <json.hpp>

#include "labelfuse4d/error.hpp"
#include "labelfuse4d/evidence_io.hpp"
#include "labelfuse4d/fs_util.hpp"

namespace lf4d {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string numbered(int frame, int view, const char* ext) {
  return std::to_string(frame) + "/" + std::to_string(view) + ext;
}

LabelRegistry parse_registry(const json& doc) {
  std::vector<LabelInfo> labels;
  for (const json& entry : doc) {
    LabelInfo info;
    info.id = static_cast<LabelId>(entry.at("id").get<int>());
    info.name = entry.at("name").get<std::string>();
    if (entry.contains("color")) {
      const auto c = entry.at("color").get<std::vector<int>>();
      if (c.size() != 3) throw std::invalid_argument("label color needs 3 components");
      for (std::size_t i = 0; i < 3; ++i) {
        if (c[i] < 0 || c[i] > 255) throw std::invalid_argument("label color component out of range");
        info.color[i] = static_cast<std::uint8_t>(c[i]);
      }
    }
    labels.push_back(std::move(info));
  }
  return LabelRegistry(std::move(labels));
}

ClassMap parse_class_map(const json& doc, const fs::path& base) {
  if (doc.is_string()) {
    const auto name = doc.get<std::string>();
    if (name == "human_parsing_20") return ClassMap::human_parsing_20();
    const fs::path path = resolve(base, name);
    if (!fs::exists(path)) fail(ErrorKind::kManifest, "class map " + path.string() + " does not exist");
    return read_class_map(path);
  }
  std::map<int, LabelId> mapping;
  for (const auto& [key, value] : doc.items()) mapping[std::stoi(key)] = static_cast<LabelId>(value.get<int>());
  return ClassMap(std::move(mapping));
}

}  // namespace

const FrameRecord& SequenceManifest::frame(int index) const {
  if (!has_frame(index)) fail(ErrorKind::kManifest, "no frame " + std::to_string(index) + " in the manifest");
  return frames[static_cast<std::size_t>(index - 1)];
}

fs::path SequenceManifest::parser_path(int frame, int view) const {
  return evidence_root / "par" / numbered(frame, view, ".png");
}
fs::path SequenceManifest::flow_path(int frame, int view) const {
  return evidence_root / "flow" / numbered(frame, view, ".flo");
}
fs::path SequenceManifest::masks_path(int frame, int view) const {
  return evidence_root / "masks" / numbered(frame, view, ".json");
}
fs::path SequenceManifest::manual_path(int frame, int view) const {
  return evidence_root / "manual" / numbered(frame, view, ".json");
}

SequenceManifest parse_manifest(std::string_view text, const fs::path& base_dir, const std::string& origin) {
  SequenceManifest m;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) fail(ErrorKind::kManifest, origin + ": manifest must be a JSON object");
    if (doc.contains("labels")) m.registry = parse_registry(doc.at("labels"));
    if (doc.contains("class_map")) m.class_map = parse_class_map(doc.at("class_map"), base_dir);
    if (doc.contains("rig")) {
      const json& rig = doc.at("rig");
      m.rig.elevation_deg = rig.value("elevation_deg", m.rig.elevation_deg);
      m.rig.image_size = rig.value("image_size", m.rig.image_size);
      m.rig.focal = rig.value("focal", m.rig.focal);
      if (rig.contains("radius") && !rig.at("radius").is_null()) m.rig.radius = rig.at("radius").get<double>();
    }
    m.evidence_root = resolve(base_dir, doc.value("evidence_root", std::string("evidence")));
    m.output_root = resolve(base_dir, doc.value("output_root", std::string("out")));
    const json& frames = doc.at("frames");
    if (!frames.is_array() || frames.empty()) fail(ErrorKind::kManifest, origin + ": 'frames' must be a non-empty list");
    for (const json& f : frames) {
      FrameRecord rec;
      rec.index = f.at("index").get<int>();
      rec.mesh = resolve(base_dir, f.at("mesh").get<std::string>());
      if (f.contains("gt_labels")) rec.gt_labels = resolve(base_dir, f.at("gt_labels").get<std::string>());
      m.frames.push_back(std::move(rec));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kManifest) throw;
    fail(ErrorKind::kManifest, origin + ": " + e.what());
  } catch (const std::exception& e) {
    fail(ErrorKind::kManifest, origin + ": " + e.what());
  }

  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    const FrameRecord& rec = m.frames[i];
    if (rec.index != static_cast<int>(i) + 1) {
      fail(ErrorKind::kManifest, origin + ": frame indices must be consecutive from 1; entry " +
                                     std::to_string(i) + " has index " + std::to_string(rec.index));
    }
    if (!fs::exists(rec.mesh)) {
      fail(ErrorKind::kManifest, origin + ": frame " + std::to_string(rec.index) + " mesh " +
                                     rec.mesh.string() + " does not exist");
    }
    if (rec.gt_labels && !fs::exists(*rec.gt_labels)) {
      fail(ErrorKind::kManifest, origin + ": frame " + std::to_string(rec.index) + " ground truth " +
                                     rec.gt_labels->string() + " does not exist");
    }
  }
  if (m.rig.image_size < 64) fail(ErrorKind::kManifest, origin + ": rig image_size must be at least 64");
  if (m.rig.radius && !(*m.rig.radius > 0.0)) fail(ErrorKind::kManifest, origin + ": rig radius must be positive");
  return m;
}

SequenceManifest load_manifest(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    fail(ErrorKind::kManifest, e.what());
  }
  SequenceManifest m = parse_manifest(text, fs::absolute(path).parent_path(), path.string());
  m.source = path;
  return m;
}

std::string encode_manifest(const SequenceManifest& m) {
  json doc;
  json labels = json::array();
  for (const LabelInfo& info : m.registry.labels()) {
    labels.push_back({{"id", info.id}, {"name", info.name}, {"color", {info.color[0], info.color[1], info.color[2]}}});
  }
  doc["labels"] = labels;
  if (!m.class_map.empty()) {
    json cm = json::object();
    for (const auto& [k, v] : m.class_map.entries()) cm[std::to_string(k)] = v;
    doc["class_map"] = cm;
  }
  json rig = {{"elevation_deg", m.rig.elevation_deg}, {"image_size", m.rig.image_size}, {"focal", m.rig.focal}};
  if (m.rig.radius) rig["radius"] = *m.rig.radius;
  doc["rig"] = rig;
  doc["evidence_root"] = m.evidence_root.string();
  doc["output_root"] = m.output_root.string();
  json frames = json::array();
  for (const FrameRecord& f : m.frames) {
    json rec = {{"index", f.index}, {"mesh", f.mesh.string()}};
    if (f.gt_labels) rec["gt_labels"] = f.gt_labels->string();
    frames.push_back(rec);
  }
  doc["frames"] = frames;
  return doc.dump(2) + "\n";
}

}  // namespace lf4d
