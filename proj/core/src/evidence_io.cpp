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

#include "labelfuse4d/evidence_io.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include <json.hpp>

#include "labelfuse4d/error.hpp"
#include "labelfuse4d/fs_util.hpp"
#include "labelfuse4d/image_io.hpp"

namespace lf4d {
namespace {

using nlohmann::json;

constexpr float kFloMagic = 202021.25f;

static_assert(std::endian::native == std::endian::little, ".flo codec assumes a little-endian host");

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(std::string_view bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

}  // namespace

std::string encode_flo(const FlowField& flow) {
  std::string out;
  out.reserve(12 + flow.vectors.size() * 8);
  put(out, kFloMagic);
  put(out, static_cast<std::int32_t>(flow.width));
  put(out, static_cast<std::int32_t>(flow.height));
  for (const auto& v : flow.vectors) {
    put(out, v.x());
    put(out, v.y());
  }
  return out;
}

FlowField decode_flo(std::string_view bytes, const std::string& origin) {
  if (bytes.size() < 12 || get<float>(bytes, 0) != kFloMagic) {
    fail(ErrorKind::kParse, origin + ": not a .flo file (bad PIEH magic)");
  }
  const auto w = get<std::int32_t>(bytes, 4);
  const auto h = get<std::int32_t>(bytes, 8);
  if (w <= 0 || h <= 0 || w > 1 << 15 || h > 1 << 15) {
    fail(ErrorKind::kParse, origin + ": implausible .flo dimensions");
  }
  FlowField flow(w, h);
  if (bytes.size() != 12 + flow.vectors.size() * 8) {
    fail(ErrorKind::kParse, origin + ": .flo payload size does not match " + std::to_string(w) + "x" + std::to_string(h));
  }
  for (std::size_t i = 0; i < flow.vectors.size(); ++i) {
    flow.vectors[i] = {get<float>(bytes, 12 + 8 * i), get<float>(bytes, 16 + 8 * i)};
    if (!flow.vectors[i].allFinite()) fail(ErrorKind::kParse, origin + ": non-finite flow vector");
  }
  return flow;
}

FlowField read_flo(const std::filesystem::path& path) { return decode_flo(read_file(path), path.string()); }

void write_flo(const FlowField& flow, const std::filesystem::path& path) {
  write_file_atomic(path, encode_flo(flow));
}

RleMask rle_encode(const BinaryMask& mask) {
  RleMask rle{mask.height, mask.width, {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (int x = 0; x < mask.width; ++x) {
    for (int y = 0; y < mask.height; ++y) {
      const std::uint8_t v = mask.pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(mask.width) + static_cast<std::size_t>(x)] ? 1 : 0;
      if (v != current) {
        rle.counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

BinaryMask rle_decode(const RleMask& rle) {
  BinaryMask mask(rle.width, rle.height);
  const std::size_t total = mask.pixels.size();
  std::size_t k = 0;
  std::uint8_t value = 0;
  for (std::uint32_t run : rle.counts) {
    if (k + run > total) fail(ErrorKind::kParse, "RLE counts exceed the mask size");
    for (std::uint32_t j = 0; j < run; ++j, ++k) {
      if (value) {
        const std::size_t x = k / static_cast<std::size_t>(rle.height);
        const std::size_t y = k % static_cast<std::size_t>(rle.height);
        mask.pixels[y * static_cast<std::size_t>(rle.width) + x] = 1;
      }
    }
    value ^= 1;
  }
  if (k != total) fail(ErrorKind::kParse, "RLE counts do not cover the mask");
  return mask;
}

std::vector<std::uint32_t> rle_counts_from_string(std::string_view text) {
  std::vector<std::uint32_t> counts;
  std::size_t p = 0;
  while (p < text.size()) {
    std::int64_t x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= text.size()) fail(ErrorKind::kParse, "truncated compressed RLE string");
      const std::int64_t c = static_cast<std::int64_t>(text[p]) - 48;
      if (c < 0 || c > 63) fail(ErrorKind::kParse, "invalid character in compressed RLE string");
      x |= (c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (!more && (c & 0x10)) x |= -(std::int64_t{1} << (5 * k));
    }
    if (counts.size() > 2) x += counts[counts.size() - 2];
    if (x < 0 || x > std::numeric_limits<std::uint32_t>::max()) fail(ErrorKind::kParse, "invalid compressed RLE run");
    counts.push_back(static_cast<std::uint32_t>(x));
  }
  return counts;
}

MaskSet decode_masks_json(std::string_view text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, origin + ": " + e.what());
  }
  if (!doc.is_array()) fail(ErrorKind::kParse, origin + ": mask file must be a JSON list");
  MaskSet masks;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json* entry = &doc[i];
    if (entry->is_object() && entry->contains("segmentation")) entry = &(*entry)["segmentation"];
    try {
      RleMask rle;
      const auto& size = entry->at("size");
      rle.height = size.at(0).get<int>();
      rle.width = size.at(1).get<int>();
      if (rle.height <= 0 || rle.width <= 0) fail(ErrorKind::kParse, "non-positive mask size");
      const auto& counts = entry->at("counts");
      if (counts.is_string()) {
        rle.counts = rle_counts_from_string(counts.get<std::string>());
      } else {
        rle.counts = counts.get<std::vector<std::uint32_t>>();
      }
      masks.push_back(rle_decode(rle));
    } catch (const json::exception& e) {
      fail(ErrorKind::kParse, origin + ": mask " + std::to_string(i) + ": " + e.what());
    } catch (const Error& e) {
      fail(ErrorKind::kParse, origin + ": mask " + std::to_string(i) + ": " + e.what());
    }
  }
  return masks;
}

std::string encode_masks_json(const MaskSet& masks) {
  json doc = json::array();
  for (const BinaryMask& mask : masks) {
    const RleMask rle = rle_encode(mask);
    doc.push_back({{"size", {rle.height, rle.width}}, {"counts", rle.counts}});
  }
  return doc.dump();
}

MaskSet read_masks(const std::filesystem::path& path) {
  return decode_masks_json(read_file(path), path.string());
}

void write_masks(const MaskSet& masks, const std::filesystem::path& path) {
  write_file_atomic(path, encode_masks_json(masks));
}

RectificationOverlay decode_overlay_json(std::string_view text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, origin + ": " + e.what());
  }
  if (!doc.is_array()) fail(ErrorKind::kParse, origin + ": overlay must be a JSON list of [x, y, label]");
  RectificationOverlay overlay;
  overlay.corrections.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& e = doc[i];
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
        !e[2].is_number_integer()) {
      fail(ErrorKind::kParse, origin + ": overlay entry " + std::to_string(i) + " is not [x, y, label]");
    }
    const auto label = e[2].get<std::int64_t>();
    if (label < kBackground || label > std::numeric_limits<LabelId>::max()) {
      fail(ErrorKind::kParse, origin + ": overlay entry " + std::to_string(i) + " has an invalid label");
    }
    const auto x = e[0].get<std::int64_t>();
    const auto y = e[1].get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max() ||
        y < std::numeric_limits<int>::min() || y > std::numeric_limits<int>::max()) {
      fail(ErrorKind::kParse, origin + ": overlay entry " + std::to_string(i) + " has an invalid coordinate");
    }
    overlay.corrections.push_back({static_cast<int>(x), static_cast<int>(y), static_cast<LabelId>(label)});
  }
  return overlay;
}

std::string encode_overlay_json(const RectificationOverlay& overlay) {
  json doc = json::array();
  for (const Correction& c : overlay.corrections) doc.push_back({c.x, c.y, c.label});
  return doc.dump();
}

RectificationOverlay read_overlay(const std::filesystem::path& path) {
  return decode_overlay_json(read_file(path), path.string());
}

void write_overlay(const RectificationOverlay& overlay, const std::filesystem::path& path) {
  write_file_atomic(path, encode_overlay_json(overlay));
}

ClassMap read_class_map(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kParse, path.string() + ": class map must be a JSON object");
  std::map<int, LabelId> mapping;
  for (const auto& [key, value] : doc.items()) {
    try {
      mapping[std::stoi(key)] = static_cast<LabelId>(value.get<int>());
    } catch (const std::exception&) {
      fail(ErrorKind::kParse, path.string() + ": bad class-map entry '" + key + "'");
    }
  }
  return ClassMap(std::move(mapping));
}

VoteImage load_parser_votes(const std::filesystem::path& path, const LabelRegistry& registry,
                            const ClassMap& class_map) {
  return parser_votes(read_index_png(path), registry, class_map, path.string());
}

}  // namespace lf4d
