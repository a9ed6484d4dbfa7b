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
#include <vector>

#include "labelfuse4d/labels.hpp"

namespace lf4d {

// Per-vertex labels of one frame (frames are numbered from 1).
struct LabelFrame {
  int frame_index = 0;
  std::vector<LabelId> labels;

  std::size_t size() const { return labels.size(); }
  bool operator==(const LabelFrame&) const = default;
};

enum class LabelFileFormat {
  kBinary,  // "L4DL", u32 count, count x little-endian int16
  kText,    // one decimal label per line
};

void save_label_frame(const LabelFrame& frame, const std::filesystem::path& path,
                      LabelFileFormat format = LabelFileFormat::kBinary);

// Format is detected from the magic bytes. When `expected_count` is given,
// a different entry count is a kShape error. Empty files are kParse errors.
// The returned frame_index is 0; callers assign it.
LabelFrame load_label_frame(const std::filesystem::path& path,
                            std::optional<std::size_t> expected_count = std::nullopt);

std::string encode_label_frame(const LabelFrame& frame, LabelFileFormat format);
LabelFrame decode_label_frame(std::string_view bytes, const std::string& origin = "<memory>");

}  // namespace lf4d
