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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "labelfuse4d/evidence.hpp"

namespace lf4d {

// Middlebury .flo: float 202021.25 ("PIEH"), int32 width, int32 height,
// then interleaved (u, v) float32 rows, all little-endian.
std::string encode_flo(const FlowField& flow);
FlowField decode_flo(std::string_view bytes, const std::string& origin = "<memory>");
FlowField read_flo(const std::filesystem::path& path);
void write_flo(const FlowField& flow, const std::filesystem::path& path);

// Uncompressed COCO-style run-length encoding: runs alternate 0/1 starting
// with 0 and traverse the image column by column.
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;
};

RleMask rle_encode(const BinaryMask& mask);
BinaryMask rle_decode(const RleMask& rle);
// COCO compressed string counts (LEB128-like, delta coded after the second
// run).
std::vector<std::uint32_t> rle_counts_from_string(std::string_view text);

// JSON list of masks. Each entry is either {"size": [h, w], "counts": ...}
// or an object holding that under "segmentation"; counts may be an integer
// array or a compressed string.
MaskSet decode_masks_json(std::string_view text, const std::string& origin = "<memory>");
std::string encode_masks_json(const MaskSet& masks);
MaskSet read_masks(const std::filesystem::path& path);
void write_masks(const MaskSet& masks, const std::filesystem::path& path);

// Overlay wire/disk format: [[x, y, label], ...] in compact JSON.
RectificationOverlay decode_overlay_json(std::string_view text, const std::string& origin = "<memory>");
std::string encode_overlay_json(const RectificationOverlay& overlay);
RectificationOverlay read_overlay(const std::filesystem::path& path);
void write_overlay(const RectificationOverlay& overlay, const std::filesystem::path& path);

// {"<source class>": <label id>, ...}
ClassMap read_class_map(const std::filesystem::path& path);

// Reads a parser PNG and maps it through the class map (see parser_votes).
VoteImage load_parser_votes(const std::filesystem::path& path, const LabelRegistry& registry,
                            const ClassMap& class_map);

}  // namespace lf4d
