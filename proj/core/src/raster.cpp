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

#include "labelfuse4d/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "labelfuse4d/error.hpp"

namespace lf4d {

RasterMap::RasterMap(int width, int height)
    : width_(width),
      height_(height),
      face_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), kNoFace),
      bary_(face_.size(), {0.0f, 0.0f, 0.0f}),
      depth_(face_.size(), std::numeric_limits<float>::infinity()) {}

std::size_t RasterMap::covered_count() const {
  return static_cast<std::size_t>(std::count_if(face_.begin(), face_.end(), [](auto f) { return f != kNoFace; }));
}

void RasterMap::set(std::size_t pixel, std::int32_t face, const std::array<float, 3>& bary, float depth) {
  face_[pixel] = face;
  bary_[pixel] = bary;
  depth_[pixel] = depth;
}

RasterMap rasterize(const TriMesh& mesh, const ViewCamera& camera) {
  const int w = camera.width;
  const int h = camera.height;
  RasterMap map(w, h);
  // Depth per pixel in double so the z-test is not decided by float rounding.
  std::vector<double> zbuf(map.pixel_count(), std::numeric_limits<double>::infinity());

  std::vector<Eigen::Vector2d> screen(mesh.vertices.size());
  std::vector<double> z(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3 c = camera.to_camera(mesh.vertices[i]);
    z[i] = c.z();
    screen[i] = c.z() > kNearClip ? camera.project_camera(c) : Eigen::Vector2d::Zero();
  }

  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    const auto i0 = static_cast<std::size_t>(face[0]);
    const auto i1 = static_cast<std::size_t>(face[1]);
    const auto i2 = static_cast<std::size_t>(face[2]);
    if (z[i0] <= kNearClip || z[i1] <= kNearClip || z[i2] <= kNearClip) continue;
    const Eigen::Vector2d& p0 = screen[i0];
    const Eigen::Vector2d& p1 = screen[i1];
    const Eigen::Vector2d& p2 = screen[i2];
    const double area = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    if (area == 0.0 || !std::isfinite(area)) continue;

    const double min_x = std::min({p0.x(), p1.x(), p2.x()});
    const double max_x = std::max({p0.x(), p1.x(), p2.x()});
    const double min_y = std::min({p0.y(), p1.y(), p2.y()});
    const double max_y = std::max({p0.y(), p1.y(), p2.y()});
    // Pixel x is sampled at x + 0.5.
    const int x_begin = std::max(0, static_cast<int>(std::ceil(std::max(min_x - 0.5, -1.0))));
    const int x_end = std::min(w - 1, static_cast<int>(std::floor(std::min(max_x - 0.5, double(w)))));
    const int y_begin = std::max(0, static_cast<int>(std::ceil(std::max(min_y - 0.5, -1.0))));
    const int y_end = std::min(h - 1, static_cast<int>(std::floor(std::min(max_y - 0.5, double(h)))));
    if (x_begin > x_end || y_begin > y_end) continue;

    const double inv_area = 1.0 / area;
    const double iz0 = 1.0 / z[i0];
    const double iz1 = 1.0 / z[i1];
    const double iz2 = 1.0 / z[i2];
    for (int y = y_begin; y <= y_end; ++y) {
      const double py = y + 0.5;
      for (int x = x_begin; x <= x_end; ++x) {
        const double px = x + 0.5;
        // Signed sub-triangle areas opposite each corner.
        const double e0 = (p2.x() - p1.x()) * (py - p1.y()) - (p2.y() - p1.y()) * (px - p1.x());
        const double e1 = (p0.x() - p2.x()) * (py - p2.y()) - (p0.y() - p2.y()) * (px - p2.x());
        const double e2 = (p1.x() - p0.x()) * (py - p0.y()) - (p1.y() - p0.y()) * (px - p0.x());
        const double b0 = e0 * inv_area;
        const double b1 = e1 * inv_area;
        const double b2 = e2 * inv_area;
        if (b0 < 0.0 || b1 < 0.0 || b2 < 0.0) continue;
        // 1/z is affine in screen space, which makes this the exact depth of
        // the triangle's plane along the pixel ray.
        const double depth = 1.0 / (b0 * iz0 + b1 * iz1 + b2 * iz2);
        const std::size_t pixel = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
        if (depth < zbuf[pixel]) {
          zbuf[pixel] = depth;
          map.set(pixel, static_cast<std::int32_t>(f),
                  {static_cast<float>(b0), static_cast<float>(b1), static_cast<float>(b2)},
                  static_cast<float>(depth));
        }
      }
    }
  }
  return map;
}

LabelImage render_labels(const RasterMap& map, const TriMesh& mesh, const LabelFrame& labels) {
  if (labels.labels.size() != mesh.vertices.size()) {
    fail(ErrorKind::kShape, "render_labels: " + std::to_string(labels.labels.size()) +
                                " labels for " + std::to_string(mesh.vertices.size()) + " vertices");
  }
  LabelImage image(map.width(), map.height());
  for (std::size_t p = 0; p < map.pixel_count(); ++p) {
    const std::int32_t f = map.face(p);
    if (f == kNoFace) continue;
    const auto& b = map.barycentric(p);
    int corner = 0;
    if (b[1] > b[corner]) corner = 1;
    if (b[2] > b[corner]) corner = 2;
    image.labels[p] = labels.labels[static_cast<std::size_t>(mesh.faces[static_cast<std::size_t>(f)][corner])];
  }
  return image;
}

RgbImage render_color(const RasterMap& map, const TriMesh& mesh) {
  if (!mesh.has_colors()) fail(ErrorKind::kInvalid, "render_color: mesh has no vertex colors");
  RgbImage image{map.width(), map.height(), std::vector<Eigen::Vector3f>(map.pixel_count(), Eigen::Vector3f::Zero())};
  for (std::size_t p = 0; p < map.pixel_count(); ++p) {
    const std::int32_t f = map.face(p);
    if (f == kNoFace) continue;
    const Face& face = mesh.faces[static_cast<std::size_t>(f)];
    const auto& b = map.barycentric(p);
    Eigen::Vector3f c = Eigen::Vector3f::Zero();
    for (int k = 0; k < 3; ++k) c += b[k] * mesh.colors[static_cast<std::size_t>(face[k])];
    image.pixels[p] = c.cwiseMax(0.0f).cwiseMin(1.0f);
  }
  return image;
}

std::vector<PixelWeight> pixels_of_vertex(const RasterMap& map, const TriMesh& mesh,
                                          std::int32_t vertex) {
  if (vertex < 0 || static_cast<std::size_t>(vertex) >= mesh.vertices.size()) {
    fail(ErrorKind::kInvalid, "pixels_of_vertex: vertex " + std::to_string(vertex) + " out of range");
  }
  std::vector<PixelWeight> out;
  for (std::size_t p = 0; p < map.pixel_count(); ++p) {
    const std::int32_t f = map.face(p);
    if (f == kNoFace) continue;
    const Face& face = mesh.faces[static_cast<std::size_t>(f)];
    for (int k = 0; k < 3; ++k) {
      if (face[k] == vertex) {
        out.push_back({static_cast<int>(p % static_cast<std::size_t>(map.width())),
                       static_cast<int>(p / static_cast<std::size_t>(map.width())),
                       static_cast<double>(map.barycentric(p)[k])});
      }
    }
  }
  return out;
}

}  // namespace lf4d
