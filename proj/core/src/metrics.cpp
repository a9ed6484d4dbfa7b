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


#include "labelfuse4d/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "labelfuse4d/error.hpp"
#include "labelfuse4d/parallel.hpp"

namespace lf4d {

ParsingReport parsing_metrics(std::span<const LabelId> pred, std::span<const LabelId> gt) {
  if (pred.size() != gt.size()) {
    fail(ErrorKind::kShape, "parsing_metrics: " + std::to_string(pred.size()) + " predictions vs " +
                                std::to_string(gt.size()) + " ground-truth entries");
  }
  std::map<LabelId, LabelScore> scores;
  ParsingReport report;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] < 0) continue;
    ++report.evaluated;
    LabelScore& g = scores[gt[i]];
    ++g.gt_count;
    if (pred[i] >= 0) ++scores[pred[i]].pred_count;
    if (pred[i] == gt[i]) {
      ++g.intersection;
      ++correct;
    }
  }
  for (auto& [label, s] : scores) {
    if (s.gt_count == 0) continue;  // predicted but absent from gt
    s.label = label;
    s.accuracy = static_cast<double>(s.intersection) / static_cast<double>(s.gt_count);
    const std::size_t uni = s.gt_count + s.pred_count - s.intersection;
    s.iou = static_cast<double>(s.intersection) / static_cast<double>(uni);
    report.per_label.push_back(s);
    report.mean_accuracy += s.accuracy;
    report.mean_iou += s.iou;
  }
  if (!report.per_label.empty()) {
    report.mean_accuracy /= static_cast<double>(report.per_label.size());
    report.mean_iou /= static_cast<double>(report.per_label.size());
    report.pixel_accuracy = static_cast<double>(correct) / static_cast<double>(report.evaluated);
  }
  return report;
}

ParsingReport parsing_metrics(const LabelImage& pred, const LabelImage& gt) {
  if (pred.width != gt.width || pred.height != gt.height) {
    fail(ErrorKind::kShape, "parsing_metrics: image sizes differ (" + std::to_string(pred.width) + "x" +
                                std::to_string(pred.height) + " vs " + std::to_string(gt.width) + "x" +
                                std::to_string(gt.height) + ")");
  }
  return parsing_metrics(std::span<const LabelId>(pred.labels), std::span<const LabelId>(gt.labels));
}

ParsingReport parsing_metrics(const LabelFrame& pred, const LabelFrame& gt) {
  return parsing_metrics(std::span<const LabelId>(pred.labels), std::span<const LabelId>(gt.labels));
}

PointCloud sample_surface(const TriMesh& mesh, std::size_t count, std::uint64_t seed) {
  if (count == 0) fail(ErrorKind::kInvalid, "sample_surface: sample count must be positive");
  std::vector<double> areas(mesh.face_count());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    areas[f] = face_area(mesh, f);
    total += areas[f];
  }
  if (!(total > 0.0)) fail(ErrorKind::kInvalid, "sample_surface: mesh has zero area");

  // Stratified by face: floor(count * share) each, remainder by largest
  // fractional part (lower face index on ties).
  std::vector<std::size_t> quota(areas.size());
  std::vector<std::pair<double, std::size_t>> remainders(areas.size());
  std::size_t assigned = 0;
  for (std::size_t f = 0; f < areas.size(); ++f) {
    const double exact = static_cast<double>(count) * areas[f] / total;
    quota[f] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[f];
    remainders[f] = {exact - std::floor(exact), f};
  }
  const std::size_t left = std::min(count - std::min(count, assigned), remainders.size());
  std::partial_sort(remainders.begin(), remainders.begin() + static_cast<std::ptrdiff_t>(left), remainders.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  for (std::size_t i = 0; i < left; ++i) ++quota[remainders[i].second];

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointCloud out;
  out.reserve(count);
  for (std::size_t f = 0; f < quota.size(); ++f) {
    const Face& face = mesh.faces[f];
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(face[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(face[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(face[2])];
    for (std::size_t i = 0; i < quota[f]; ++i) {
      const double r1 = std::sqrt(unit(rng));
      const double r2 = unit(rng);
      out.push_back((1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c);
    }
  }
  return out;
}

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) fail(ErrorKind::kInvalid, "KdTree: empty point set");
  std::vector<std::int32_t> order(points_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int32_t>(i);
  nodes_.reserve(points_.size());
  root_ = build(order, 0, order.size());
}

std::int32_t KdTree::build(std::vector<std::int32_t>& order, std::size_t lo, std::size_t hi) {
  if (lo >= hi) return -1;
  Vec3 mn = points_[static_cast<std::size_t>(order[lo])];
  Vec3 mx = mn;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    mn = mn.cwiseMin(points_[static_cast<std::size_t>(order[i])]);
    mx = mx.cwiseMax(points_[static_cast<std::size_t>(order[i])]);
  }
  int axis = 0;
  (mx - mn).maxCoeff(&axis);
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(lo), order.begin() + static_cast<std::ptrdiff_t>(mid),
                   order.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::int32_t a, std::int32_t b) {
                     return points_[static_cast<std::size_t>(a)][axis] < points_[static_cast<std::size_t>(b)][axis];
                   });
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{-1, -1, order[mid], axis});
  const std::int32_t left = build(order, lo, mid);
  const std::int32_t right = build(order, mid + 1, hi);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

void KdTree::search(std::int32_t node, const Vec3& query, double& best) const {
  if (node < 0) return;
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const Vec3& p = points_[static_cast<std::size_t>(n.point)];
  best = std::min(best, (p - query).squaredNorm());
  const double diff = query[n.axis] - p[n.axis];
  // Near side first so the far side is pruned against a tight bound.
  search(diff < 0.0 ? n.left : n.right, query, best);
  if (diff * diff < best) search(diff < 0.0 ? n.right : n.left, query, best);
}

double KdTree::nearest_squared(const Vec3& query) const {
  double best = std::numeric_limits<double>::infinity();
  search(root_, query, best);
  return best;
}

double directed_chamfer(std::span<const Vec3> x, std::span<const Vec3> y) {
  if (x.empty() || y.empty()) fail(ErrorKind::kInvalid, "chamfer: point clouds must be non-empty");
  const KdTree tree(y);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (x.size() + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(x.size(), (c + 1) * kChunk);
    double sum = 0.0;
    for (std::size_t i = c * kChunk; i < end; ++i) sum += tree.nearest_squared(x[i]);
    partial[c] = sum;
  });
  double sum = 0.0;
  for (double s : partial) sum += s;
  return sum / static_cast<double>(x.size());
}

double chamfer_squared(std::span<const Vec3> x, std::span<const Vec3> y) {
  return directed_chamfer(x, y) + directed_chamfer(y, x);
}

EdgeLengths edge_lengths(const TriMesh& deformed, const TriMesh& rest) {
  if (deformed.vertex_count() != rest.vertex_count() || deformed.faces != rest.faces) {
    fail(ErrorKind::kShape, "edge_lengths: deformed mesh and template do not share topology");
  }
  const AdjacencyGraph graph = build_adjacency(rest);
  EdgeLengths out;
  out.rest.reserve(graph.edge_count());
  out.current.reserve(graph.edge_count());
  for (const auto& [a, b] : graph.edges()) {
    const auto i = static_cast<std::size_t>(a);
    const auto j = static_cast<std::size_t>(b);
    out.rest.push_back((rest.vertices[i] - rest.vertices[j]).norm());
    out.current.push_back((deformed.vertices[i] - deformed.vertices[j]).norm());
  }
  return out;
}

double stretching_energy(const EdgeLengths& edges) {
  if (edges.rest.size() != edges.current.size()) fail(ErrorKind::kShape, "stretching_energy: misaligned edges");
  if (edges.rest.empty()) fail(ErrorKind::kInvalid, "stretching_energy: no edges");
  double sum = 0.0;
  for (std::size_t i = 0; i < edges.rest.size(); ++i) {
    const double d = edges.current[i] - edges.rest[i];
    sum += d * d;
  }
  return sum / static_cast<double>(edges.rest.size());
}

double simulation_loss(const TriMesh& sim, const TriMesh& gt, const TriMesh& rest, double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorKind::kInvalid, "simulation_loss: weight must be finite and >= 0");
  const double chamfer = chamfer_squared(sim.vertices, gt.vertices);
  const double stretch = stretching_energy(edge_lengths(sim, rest));
  return chamfer + w * stretch;
}

TriMesh scaled(const TriMesh& mesh, double factor) {
  TriMesh out = mesh;
  for (Vec3& v : out.vertices) v *= factor;
  return out;
}

}  // namespace lf4d
