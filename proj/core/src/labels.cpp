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

#include "labelfuse4d/labels.hpp"

#include <algorithm>
#include <set>

#include "labelfuse4d/error.hpp"

namespace lf4d {

LabelRegistry::LabelRegistry(std::vector<LabelInfo> labels) {
  if (labels.empty()) fail(ErrorKind::kInvalid, "label registry is empty");
  std::sort(labels.begin(), labels.end(),
            [](const LabelInfo& a, const LabelInfo& b) { return a.id < b.id; });
  std::set<std::string> names;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].id != static_cast<LabelId>(i)) {
      fail(ErrorKind::kInvalid,
           "label registry ids must be contiguous from 0; missing id " + std::to_string(i));
    }
    if (!names.insert(labels[i].name).second) {
      fail(ErrorKind::kInvalid, "duplicate label name '" + labels[i].name + "'");
    }
  }
  labels_ = std::move(labels);
}

LabelRegistry LabelRegistry::human_default() {
  return LabelRegistry({
      {0, "skin", {255, 128, 0}},
      {1, "hair", {128, 0, 255}},
      {2, "shoe", {255, 255, 0}},
      {3, "upper", {0, 0, 255}},
      {4, "lower", {0, 255, 0}},
      {5, "outer", {255, 0, 0}},
  });
}

const LabelInfo& LabelRegistry::at(LabelId id) const {
  if (!contains(id)) fail(ErrorKind::kInvalid, "label id " + std::to_string(id) + " not in registry");
  return labels_[static_cast<std::size_t>(id)];
}

LabelId LabelRegistry::find(const std::string& name) const {
  for (const auto& info : labels_) {
    if (info.name == name) return info.id;
  }
  return kBackground;
}

ClassMap ClassMap::human_parsing_20() {
  return ClassMap({
      {0, kBackground},  // background
      {1, 1},            // hat
      {2, 1},            // hair
      {3, 0},            // glove
      {4, 1},            // sunglasses
      {5, 3},            // upper-clothes
      {6, 3},            // dress
      {7, 5},            // coat
      {8, 2},            // socks
      {9, 4},            // pants
      {10, 0},           // torso-skin
      {11, 3},           // scarf
      {12, 4},           // skirt
      {13, 0},           // face
      {14, 0},           // left-arm
      {15, 0},           // right-arm
      {16, 0},           // left-leg
      {17, 0},           // right-leg
      {18, 2},           // left-shoe
      {19, 2},           // right-shoe
  });
}

LabelId ClassMap::map(int source_class) const {
  auto it = mapping_.find(source_class);
  if (it == mapping_.end()) {
    fail(ErrorKind::kEvidence, "no class-map entry for palette index " + std::to_string(source_class));
  }
  return it->second;
}

}  // namespace lf4d
