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

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lf4d {

// Per-vertex / per-pixel semantic label. Ids >= 0 are optimization targets;
// kBackground marks "other" and never takes part in the optimization.
using LabelId = std::int16_t;
inline constexpr LabelId kBackground = -1;

using Rgb8 = std::array<std::uint8_t, 3>;

struct LabelInfo {
  LabelId id = 0;
  std::string name;
  Rgb8 color{0, 0, 0};
};

// Contiguous label set 0..size()-1 with display names and palette colors.
class LabelRegistry {
 public:
  LabelRegistry() = default;
  // Throws kInvalid unless ids are exactly 0..n-1 (any order) with unique
  // names.
  explicit LabelRegistry(std::vector<LabelInfo> labels);

  // skin, hair, shoe, upper, lower, outer.
  static LabelRegistry human_default();

  int size() const { return static_cast<int>(labels_.size()); }
  bool contains(LabelId id) const { return id >= 0 && id < size(); }
  const LabelInfo& at(LabelId id) const;
  const std::vector<LabelInfo>& labels() const { return labels_; }
  LabelId find(const std::string& name) const;  // kBackground if absent

  // Background color (white) for rendered label images.
  static constexpr Rgb8 kBackgroundColor{255, 255, 255};

 private:
  std::vector<LabelInfo> labels_;
};

// Maps class indices of an external parser to registry labels.
class ClassMap {
 public:
  ClassMap() = default;
  explicit ClassMap(std::map<int, LabelId> mapping) : mapping_(std::move(mapping)) {}

  // 20-class human parsing taxonomy (background, hat, hair, glove,
  // sunglasses, upper-clothes, dress, coat, socks, pants, torso-skin, scarf,
  // skirt, face, left/right arm, left/right leg, left/right shoe) folded
  // into the six default labels.
  static ClassMap human_parsing_20();

  bool empty() const { return mapping_.empty(); }
  bool contains(int source_class) const { return mapping_.count(source_class) != 0; }
  LabelId map(int source_class) const;  // throws kEvidence on unknown class
  const std::map<int, LabelId>& entries() const { return mapping_; }

 private:
  std::map<int, LabelId> mapping_;
};

}  // namespace lf4d
