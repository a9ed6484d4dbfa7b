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
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace lf4d {

using Vec3 = Eigen::Vector3d;
using Face = std::array<std::int32_t, 3>;

// Triangle mesh in meters. `colors` is either empty or one RGB in [0,1] per
// vertex.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Eigen::Vector3f> colors;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
  bool has_colors() const { return !colors.empty(); }
};

// Throws Error(kInvalid) when the mesh breaks a TriMesh invariant: empty
// vertex/face lists, out-of-range or repeated face indices, non-finite
// coordinates, or a color array of the wrong length.
void validate(const TriMesh& mesh);

struct BoundingBox {
  Vec3 min;
  Vec3 max;
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
};

BoundingBox bounding_box(const TriMesh& mesh);

// Radius of the smallest origin-centered sphere enclosing all vertices.
double bounding_radius(const TriMesh& mesh);

struct RecenterResult {
  TriMesh mesh;
  Vec3 offset;  // original = recentered + offset
};

// Shifts the mesh so its axis-aligned bounding box is centered on the origin.
RecenterResult recenter(const TriMesh& mesh);

double face_area(const TriMesh& mesh, std::size_t face);

// Undirected mesh edge (first < second).
using Edge = std::pair<std::int32_t, std::int32_t>;

// Unique undirected edges of a mesh, sorted lexicographically.
class AdjacencyGraph {
 public:
  AdjacencyGraph() = default;
  AdjacencyGraph(std::size_t vertex_count, std::vector<Edge> edges);

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool connected(std::int32_t a, std::int32_t b) const;

 private:
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
};

AdjacencyGraph build_adjacency(const TriMesh& mesh);

}  // namespace lf4d
