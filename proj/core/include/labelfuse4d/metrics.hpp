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
#include <span>
#include <vector>

#include "labelfuse4d/label_frame.hpp"
#include "labelfuse4d/mesh.hpp"
#include "labelfuse4d/raster.hpp"

namespace lf4d {

struct LabelScore {
  LabelId label = 0;
  std::size_t gt_count = 0;
  std::size_t pred_count = 0;  // over pixels/vertices with a gt label
  std::size_t intersection = 0;
  double accuracy = 0.0;  // intersection / gt_count
  double iou = 0.0;       // intersection / union
};

// Per-label recall and IoU over the labels present in gt; gt entries of
// kBackground are ignored. Means are unweighted over those labels.
struct ParsingReport {
  std::vector<LabelScore> per_label;
  double mean_accuracy = 0.0;
  double mean_iou = 0.0;
  double pixel_accuracy = 0.0;  // correct / evaluated
  std::size_t evaluated = 0;
};

ParsingReport parsing_metrics(std::span<const LabelId> pred, std::span<const LabelId> gt);
ParsingReport parsing_metrics(const LabelImage& pred, const LabelImage& gt);
ParsingReport parsing_metrics(const LabelFrame& pred, const LabelFrame& gt);

using PointCloud = std::vector<Vec3>;

inline constexpr std::uint64_t kDefaultSampleSeed = 20240607;

// Area-weighted surface samples, stratified by face (each face gets its
// largest-remainder share of `count`), uniform within a face; deterministic
// per seed.
PointCloud sample_surface(const TriMesh& mesh, std::size_t count, std::uint64_t seed = kDefaultSampleSeed);

// Static 3-d tree for nearest-neighbour queries.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }
  // Squared distance to the nearest stored point.
  double nearest_squared(const Vec3& query) const;

 private:
  struct Node {
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t point = -1;
    int axis = 0;
  };
  std::int32_t build(std::vector<std::int32_t>& order, std::size_t lo, std::size_t hi);
  void search(std::int32_t node, const Vec3& query, double& best) const;

  std::vector<Vec3> points_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

// Mean over x of the squared distance to the nearest point of y.
double directed_chamfer(std::span<const Vec3> x, std::span<const Vec3> y);
// Symmetric squared Chamfer distance: directed(x, y) + directed(y, x).
double chamfer_squared(std::span<const Vec3> x, std::span<const Vec3> y);

struct EdgeLengths {
  std::vector<double> rest;     // template
  std::vector<double> current;  // deformed
};

// Lengths of the template's unique edges in both meshes. Throws kShape when
// the meshes do not share topology.
EdgeLengths edge_lengths(const TriMesh& deformed, const TriMesh& rest);
double stretching_energy(const EdgeLengths& edges);

// Vertex Chamfer between sim and gt plus w times the stretching energy of
// sim against the template. Units follow the inputs (scale meters by 100 for
// centimeters before calling).
double simulation_loss(const TriMesh& sim, const TriMesh& gt, const TriMesh& rest, double w = 1.0);

TriMesh scaled(const TriMesh& mesh, double factor);

}  // namespace lf4d
