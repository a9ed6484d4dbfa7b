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
#include <vector>

#include "labelfuse4d/camera.hpp"
#include "labelfuse4d/label_frame.hpp"
#include "labelfuse4d/labels.hpp"
#include "labelfuse4d/mesh.hpp"

namespace lf4d {

inline constexpr std::int32_t kNoFace = -1;

// Faces whose vertices come closer to the camera plane than this (meters)
// are not drawn.
inline constexpr double kNearClip = 1e-4;

// Per-pixel visibility of a mesh in one view: nearest face, its screen-space
// barycentric coordinates and the camera-frame depth at the pixel center.
class RasterMap {
 public:
  RasterMap() = default;
  RasterMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return face_.size(); }

  std::int32_t face(std::size_t pixel) const { return face_[pixel]; }
  bool covered(std::size_t pixel) const { return face_[pixel] != kNoFace; }
  // Only meaningful where covered().
  const std::array<float, 3>& barycentric(std::size_t pixel) const { return bary_[pixel]; }
  float depth(std::size_t pixel) const { return depth_[pixel]; }

  std::size_t covered_count() const;

  void set(std::size_t pixel, std::int32_t face, const std::array<float, 3>& bary, float depth);

  bool operator==(const RasterMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::int32_t> face_;
  std::vector<std::array<float, 3>> bary_;
  std::vector<float> depth_;
};

// Row-major W x H grid of labels; kBackground where nothing is drawn.
struct LabelImage {
  int width = 0;
  int height = 0;
  std::vector<LabelId> labels;

  LabelImage() = default;
  LabelImage(int w, int h, LabelId fill = kBackground)
      : width(w), height(h), labels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  LabelId& at(int x, int y) { return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
  LabelId at(int x, int y) const { return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
  bool operator==(const LabelImage&) const = default;
};

// Row-major float RGB in [0, 1].
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Eigen::Vector3f> pixels;
};

// Z-buffered rasterization sampled at pixel centers. Faces are not culled by
// orientation; depth ties keep the lower face index. Faces with a vertex
// closer than kNearClip to (or behind) the camera plane are skipped.
RasterMap rasterize(const TriMesh& mesh, const ViewCamera& camera);

// Each covered pixel takes the label of its face's vertex with the largest
// barycentric coordinate (first corner on ties).
LabelImage render_labels(const RasterMap& map, const TriMesh& mesh, const LabelFrame& labels);

// Barycentric interpolation of vertex colors; black background.
RgbImage render_color(const RasterMap& map, const TriMesh& mesh);

struct PixelWeight {
  int x = 0;
  int y = 0;
  double weight = 0.0;  // barycentric coordinate of the vertex at the pixel
};

// Covered pixels whose face contains `vertex`, in row-major order.
std::vector<PixelWeight> pixels_of_vertex(const RasterMap& map, const TriMesh& mesh,
                                          std::int32_t vertex);

}  // namespace lf4d
