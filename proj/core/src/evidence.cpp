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

#include "labelfuse4d/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "labelfuse4d/error.hpp"

namespace lf4d {

const char* to_string(VoteSource source) {
  switch (source) {
    case VoteSource::kParser: return "par";
    case VoteSource::kFlow: return "opt";
    case VoteSource::kMask: return "sam";
    case VoteSource::kManual: return "man";
  }
  return "?";
}

VoteImage VoteImage::hard(VoteSource source, LabelImage labels) {
  VoteImage image;
  image.source_ = source;
  image.width_ = labels.width;
  image.height_ = labels.height;
  image.labels_ = std::move(labels);
  return image;
}

VoteImage VoteImage::soft(VoteSource source, int width, int height, int num_labels) {
  VoteImage image;
  image.source_ = source;
  image.width_ = width;
  image.height_ = height;
  image.soft_ = true;
  image.num_labels_ = num_labels;
  image.scores_.assign(image.pixel_count() * static_cast<std::size_t>(num_labels), 0.0);
  return image;
}

std::size_t BinaryMask::area() const {
  return static_cast<std::size_t>(std::count_if(pixels.begin(), pixels.end(), [](auto v) { return v != 0; }));
}

VoteImage parser_votes(const IndexImage& image, const LabelRegistry& registry,
                       const ClassMap& class_map, const std::string& origin) {
  LabelImage labels(image.width, image.height);
  for (std::size_t i = 0; i < image.indices.size(); ++i) {
    const int index = image.indices[i];
    LabelId label = kBackground;
    if (!class_map.empty()) {
      if (!class_map.contains(index)) {
        fail(ErrorKind::kEvidence, origin + ": palette index " + std::to_string(index) + " has no class-map entry");
      }
      label = class_map.map(index);
    } else if (index != kBackgroundIndex) {
      label = static_cast<LabelId>(index);
    }
    if (label != kBackground && !registry.contains(label)) {
      fail(ErrorKind::kEvidence, origin + ": palette index " + std::to_string(index) +
                                     " maps to unregistered label " + std::to_string(label));
    }
    labels.labels[i] = label;
  }
  return VoteImage::hard(VoteSource::kParser, std::move(labels));
}

VoteImage warp_labels(const LabelImage& previous, const FlowField& flow) {
  if (previous.width != flow.width || previous.height != flow.height) {
    fail(ErrorKind::kShape, "warp_labels: label image " + std::to_string(previous.width) + "x" +
                                std::to_string(previous.height) + " vs flow " + std::to_string(flow.width) +
                                "x" + std::to_string(flow.height));
  }
  const int w = previous.width;
  const int h = previous.height;
  LabelId max_label = kBackground;
  for (LabelId l : previous.labels) max_label = std::max(max_label, l);
  LabelImage out(w, h);
  if (max_label < 0) return VoteImage::hard(VoteSource::kFlow, std::move(out));

  const auto num_labels = static_cast<std::size_t>(max_label) + 1;
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * num_labels, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      const LabelId l = previous.labels[p];
      if (l < 0) continue;
      const Eigen::Vector2f& v = flow.vectors[p];
      if (!v.allFinite()) continue;
      const double tx = std::floor(x + static_cast<double>(v.x()) + 0.5);
      const double ty = std::floor(y + static_cast<double>(v.y()) + 0.5);
      if (tx < 0 || ty < 0 || tx >= w || ty >= h) continue;
      const std::size_t q = static_cast<std::size_t>(ty) * static_cast<std::size_t>(w) + static_cast<std::size_t>(tx);
      ++counts[q * num_labels + static_cast<std::size_t>(l)];
    }
  }
  for (std::size_t q = 0; q < out.labels.size(); ++q) {
    std::uint32_t best = 0;
    for (std::size_t l = 0; l < num_labels; ++l) {
      const std::uint32_t c = counts[q * num_labels + l];
      if (c > best) {
        best = c;
        out.labels[q] = static_cast<LabelId>(l);
      }
    }
  }
  return VoteImage::hard(VoteSource::kFlow, std::move(out));
}

MaskSet filter_masks(const MaskSet& raw, const RasterMap& coverage, const MaskFilterParams& params) {
  const std::size_t foreground = coverage.covered_count();
  MaskSet kept;
  for (const BinaryMask& mask : raw) {
    if (mask.width != coverage.width() || mask.height != coverage.height()) {
      fail(ErrorKind::kShape, "filter_masks: mask size does not match the view");
    }
    std::size_t area = 0;
    std::size_t background = 0;
    for (std::size_t p = 0; p < mask.pixels.size(); ++p) {
      if (!mask.pixels[p]) continue;
      ++area;
      if (!coverage.covered(p)) ++background;
    }
    if (area < params.min_area || area == 0) continue;
    if (static_cast<double>(background) > params.max_background_fraction * static_cast<double>(area)) continue;
    const auto inside = static_cast<double>(area - background);
    if (inside > params.max_foreground_fraction * static_cast<double>(foreground)) continue;
    kept.push_back(mask);
  }
  return kept;
}

namespace {

void check_same_size(const BinaryMask& mask, const VoteImage& votes, const char* what) {
  if (mask.width != votes.width() || mask.height != votes.height()) {
    fail(ErrorKind::kShape, std::string("mask size does not match ") + what + " votes");
  }
}

// Sum over mask pixels of parser + weight * flow votes, for every label.
std::vector<double> mask_vote_mass(const BinaryMask& mask, const VoteImage& parser, const VoteImage* flow,
                                   double parser_flow_weight, int num_labels, std::size_t& area) {
  std::vector<double> parser_mass(static_cast<std::size_t>(num_labels), 0.0);
  std::vector<double> flow_mass(static_cast<std::size_t>(num_labels), 0.0);
  area = 0;
  for (std::size_t p = 0; p < mask.pixels.size(); ++p) {
    if (!mask.pixels[p]) continue;
    ++area;
    for (LabelId l = 0; l < num_labels; ++l) {
      parser_mass[static_cast<std::size_t>(l)] += parser.vote(p, l);
      if (flow) flow_mass[static_cast<std::size_t>(l)] += flow->vote(p, l);
    }
  }
  for (std::size_t l = 0; l < parser_mass.size(); ++l) parser_mass[l] += parser_flow_weight * flow_mass[l];
  return parser_mass;
}

}  // namespace

double mask_score(LabelId label, const BinaryMask& mask, const VoteImage& parser,
                  const VoteImage* flow, double parser_flow_weight) {
  if (!(parser_flow_weight >= 0.0)) fail(ErrorKind::kInvalid, "mask_score: negative parser/flow weight");
  check_same_size(mask, parser, "parser");
  if (flow) check_same_size(mask, *flow, "flow");
  if (label < 0) return 0.0;
  std::size_t area = 0;
  const auto mass = mask_vote_mass(mask, parser, flow, parser_flow_weight, label + 1, area);
  if (area == 0) fail(ErrorKind::kInvalid, "mask_score: empty mask");
  return mass[static_cast<std::size_t>(label)] / (static_cast<double>(area) * (1.0 + parser_flow_weight));
}

VoteImage sam_votes(const MaskSet& masks, const VoteImage& parser, const VoteImage* flow,
                    double parser_flow_weight, int num_labels) {
  if (!(parser_flow_weight >= 0.0)) fail(ErrorKind::kInvalid, "sam_votes: negative parser/flow weight");
  VoteImage out = VoteImage::soft(VoteSource::kMask, parser.width(), parser.height(), num_labels);
  for (const BinaryMask& mask : masks) {
    check_same_size(mask, parser, "parser");
    if (flow) check_same_size(mask, *flow, "flow");
    std::size_t area = 0;
    auto mass = mask_vote_mass(mask, parser, flow, parser_flow_weight, num_labels, area);
    if (area == 0) continue;
    const double norm = static_cast<double>(area) * (1.0 + parser_flow_weight);
    for (auto& m : mass) m /= norm;
    for (std::size_t p = 0; p < mask.pixels.size(); ++p) {
      if (!mask.pixels[p]) continue;
      for (LabelId l = 0; l < num_labels; ++l) out.score(p, l) += mass[static_cast<std::size_t>(l)];
    }
  }
  return out;
}

VoteImage manual_votes(const RectificationOverlay& overlay, int width, int height) {
  LabelImage labels(width, height);
  for (const Correction& c : overlay.corrections) {
    if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height) {
      fail(ErrorKind::kInvalid, "correction at (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                                    ") is outside the " + std::to_string(width) + "x" +
                                    std::to_string(height) + " image");
    }
    labels.at(c.x, c.y) = c.label;
  }
  return VoteImage::hard(VoteSource::kManual, std::move(labels));
}

}  // namespace lf4d
