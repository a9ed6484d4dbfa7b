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

#include "labelfuse4d/labels.hpp"
#include "labelfuse4d/raster.hpp"

namespace lf4d {

// Raw 8-bit indices from a palette or grayscale PNG.
struct IndexImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> indices;
};

inline constexpr std::uint8_t kBackgroundIndex = 255;

// Palette PNG: index = label id, kBackground <-> 255 (white).
std::string encode_label_png(const LabelImage& image, const LabelRegistry& registry);
void write_label_png(const LabelImage& image, const LabelRegistry& registry,
                     const std::filesystem::path& path);

// Reads the raw indices of an 8-bit palette or grayscale PNG; anything else
// is a kParse error.
IndexImage decode_index_png(std::string_view bytes, const std::string& origin = "<memory>");
IndexImage read_index_png(const std::filesystem::path& path);

// Converts indices to labels: 255 is background, other indices must be
// registry ids.
LabelImage to_label_image(const IndexImage& image, const LabelRegistry& registry,
                          const std::string& origin = "<memory>");

std::string encode_rgb_png(const RgbImage& image);
void write_rgb_png(const RgbImage& image, const std::filesystem::path& path);
RgbImage read_rgb_png(const std::filesystem::path& path);

}  // namespace lf4d
