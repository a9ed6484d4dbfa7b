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
#include <vector>

#include <Eigen/Core>

#include "labelfuse4d/labels.hpp"
#include "labelfuse4d/image_io.hpp"
#include "labelfuse4d/raster.hpp"

namespace lf4d {

enum class VoteSource { kParser, kFlow, kMask, kManual };

const char* to_string(VoteSource source);

// Per-pixel label evidence of one view. Hard images vote 1 for the stored
// label and 0 for every other label (background votes 0 everywhere); soft
// images hold a score per (pixel, label).
class VoteImage {
 public:
  VoteImage() = default;

  static VoteImage hard(VoteSource source, LabelImage labels);
  static VoteImage soft(VoteSource source, int width, int height, int num_labels);

  VoteSource source() const { return source_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_); }
  bool is_soft() const { return soft_; }
  int num_labels() const { return num_labels_; }

  double vote(std::size_t pixel, LabelId label) const {
    if (soft_) {
      return (label >= 0 && label < num_labels_)
                 ? scores_[pixel * static_cast<std::size_t>(num_labels_) + static_cast<std::size_t>(label)]
                 : 0.0;
    }
    return (label >= 0 && labels_.labels[pixel] == label) ? 1.0 : 0.0;
  }

  // Hard images only.
  const LabelImage& labels() const { return labels_; }
  LabelId label(std::size_t pixel) const { return labels_.labels[pixel]; }

  // Soft images only.
  double& score(std::size_t pixel, LabelId label) {
    return scores_[pixel * static_cast<std::size_t>(num_labels_) + static_cast<std::size_t>(label)];
  }
  const std::vector<double>& scores() const { return scores_; }

  bool operator==(const VoteImage&) const = default;

 private:
  VoteSource source_ = VoteSource::kParser;
  int width_ = 0;
  int height_ = 0;
  bool soft_ = false;
  int num_labels_ = 0;
  LabelImage labels_;
  std::vector<double> scores_;
};

// Pixel displacement from frame k-1 to frame k (x right, y down).
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<Eigen::Vector2f> vectors;

  FlowField() = default;
  FlowField(int w, int h)
      : width(w), height(h), vectors(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), Eigen::Vector2f::Zero()) {}
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 0 or 1

  BinaryMask() = default;
  BinaryMask(int w, int h)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

  std::size_t area() const;
  bool operator==(const BinaryMask&) const = default;
};

using MaskSet = std::vector<BinaryMask>;

struct Correction {
  int x = 0;
  int y = 0;
  LabelId label = kBackground;  // kBackground erases: the pixel votes for nothing
  bool operator==(const Correction&) const = default;
};

// Sparse annotator corrections for one view.
struct RectificationOverlay {
  std::vector<Correction> corrections;
  bool empty() const { return corrections.empty(); }
  bool operator==(const RectificationOverlay&) const = default;
};

struct MaskFilterParams {
  double max_background_fraction = 0.05;  // of the mask area
  double max_foreground_fraction = 0.90;  // of the rendered foreground
  std::size_t min_area = 100;             // pixels
};

// Maps parser class indices to a hard parser vote image. With an empty class
// map, indices must already be registry ids (255 = background).
VoteImage parser_votes(const IndexImage& image, const LabelRegistry& registry,
                       const ClassMap& class_map, const std::string& origin = "<memory>");

// Forward warp: every labelled source pixel deposits its label at
// round(p + v); each target takes the majority of its deposits (smallest id on
// ties) and stays background when nothing lands on it.
VoteImage warp_labels(const LabelImage& previous, const FlowField& flow);

// Drops masks that are too small, mostly background, or cover nearly the
// whole rendered foreground. Order of the retained masks is preserved.
MaskSet filter_masks(const MaskSet& raw, const RasterMap& coverage,
                     const MaskFilterParams& params = {});

// Area-normalized agreement of parser and flow votes with `label` inside the
// mask. `flow` may be null (contributes no votes).
double mask_score(LabelId label, const BinaryMask& mask, const VoteImage& parser,
                  const VoteImage* flow, double parser_flow_weight);

// Soft votes: each pixel sums the scores of all masks containing it.
VoteImage sam_votes(const MaskSet& masks, const VoteImage& parser, const VoteImage* flow,
                    double parser_flow_weight, int num_labels);

// Hard votes from the overlay; untouched pixels vote for nothing. Throws
// kInvalid for corrections outside the image.
VoteImage manual_votes(const RectificationOverlay& overlay, int width, int height);

}  // namespace lf4d
