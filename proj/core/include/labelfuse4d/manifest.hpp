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


#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "labelfuse4d/camera.hpp"
#include "labelfuse4d/labels.hpp"

namespace lf4d {

struct FrameRecord {
  int index = 0;  // 1-based
  std::filesystem::path mesh;
  std::optional<std::filesystem::path> gt_labels;
};

struct RigSpec {
  double elevation_deg = 35.0;
  int image_size = 512;
  double focal = 0.0;                  // <= 0: default
  std::optional<double> radius;        // absent: fit to the sequence
};

// Sequence description. Relative paths in the JSON document resolve against
// the manifest's directory; stored paths are absolute-or-as-resolved.
//
//   {
//     "labels": [{"id": 0, "name": "skin", "color": [r, g, b]}, ...],
//     "class_map": "classes.json" | {"13": 0, ...} | "human_parsing_20",
//     "rig": {"elevation_deg": 35, "image_size": 512, "focal": 0, "radius": 2.5},
//     "evidence_root": "evidence",
//     "output_root": "out",
//     "frames": [{"index": 1, "mesh": "meshes/1.ply", "gt_labels": "gt/1.l4dl"}, ...]
//   }
//
// Everything but "frames" is optional. Without a class map parser PNG
// indices are registry ids, 255 meaning background.
struct SequenceManifest {
  std::filesystem::path source;  // manifest file, if loaded from disk
  LabelRegistry registry = LabelRegistry::human_default();
  ClassMap class_map;
  RigSpec rig;
  std::filesystem::path evidence_root;
  std::filesystem::path output_root;
  std::vector<FrameRecord> frames;

  std::size_t frame_count() const { return frames.size(); }
  const FrameRecord& frame(int index) const;  // throws kManifest when unknown
  bool has_frame(int index) const { return index >= 1 && static_cast<std::size_t>(index) <= frames.size(); }

  std::filesystem::path parser_path(int frame, int view) const;
  std::filesystem::path flow_path(int frame, int view) const;
  std::filesystem::path masks_path(int frame, int view) const;
  std::filesystem::path manual_path(int frame, int view) const;
};

// Throws Error(kManifest) on malformed documents, non-consecutive frame
// indices, or referenced files that do not exist.
SequenceManifest load_manifest(const std::filesystem::path& path);
SequenceManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                                const std::string& origin = "<memory>");
std::string encode_manifest(const SequenceManifest& manifest);

}  // namespace lf4d
