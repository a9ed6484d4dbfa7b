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

#include "labelfuse4d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "labelfuse4d/error.hpp"

namespace lf4d {

void validate(const TriMesh& mesh) {
  if (mesh.vertices.empty()) fail(ErrorKind::kInvalid, "mesh has no vertices");
  if (mesh.faces.empty()) fail(ErrorKind::kInvalid, "mesh has no faces");
  const auto n = static_cast<std::int64_t>(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!mesh.vertices[i].allFinite()) {
      fail(ErrorKind::kInvalid, "vertex " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    for (auto index : face) {
      if (index < 0 || index >= n) {
        fail(ErrorKind::kInvalid, "face " + std::to_string(f) + " references vertex " +
                                      std::to_string(index) + " but the mesh has " +
                                      std::to_string(n) + " vertices");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      fail(ErrorKind::kInvalid, "face " + std::to_string(f) + " repeats a vertex");
    }
  }
  if (!mesh.colors.empty()) {
    if (mesh.colors.size() != mesh.vertices.size()) {
      fail(ErrorKind::kInvalid, "vertex color count does not match vertex count");
    }
    for (const auto& c : mesh.colors) {
      if (!c.allFinite()) fail(ErrorKind::kInvalid, "non-finite vertex color");
    }
  }
}

BoundingBox bounding_box(const TriMesh& mesh) {
  BoundingBox box{Vec3::Constant(0.0), Vec3::Constant(0.0)};
  if (mesh.vertices.empty()) return box;
  box.min = box.max = mesh.vertices.front();
  for (const auto& v : mesh.vertices) {
    box.min = box.min.cwiseMin(v);
    box.max = box.max.cwiseMax(v);
  }
  return box;
}

double bounding_radius(const TriMesh& mesh) {
  double r2 = 0.0;
  for (const auto& v : mesh.vertices) r2 = std::max(r2, v.squaredNorm());
  return std::sqrt(r2);
}

RecenterResult recenter(const TriMesh& mesh) {
  RecenterResult result{mesh, bounding_box(mesh).center()};
  for (auto& v : result.mesh.vertices) v -= result.offset;
  return result;
}

double face_area(const TriMesh& mesh, std::size_t face) {
  const Face& f = mesh.faces[face];
  const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
  const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
  const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
  return 0.5 * (b - a).cross(c - a).norm();
}

AdjacencyGraph::AdjacencyGraph(std::size_t vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool AdjacencyGraph::connected(std::int32_t a, std::int32_t b) const {
  if (a == b) return false;
  const Edge key = a < b ? Edge{a, b} : Edge{b, a};
  return std::binary_search(edges_.begin(), edges_.end(), key);
}

AdjacencyGraph build_adjacency(const TriMesh& mesh) {
  std::vector<Edge> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const Face& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      std::int32_t a = f[k];
      std::int32_t b = f[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b);
    }
  }
  return AdjacencyGraph(mesh.vertices.size(), std::move(edges));
}

}  // namespace lf4d
