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

#include "labelfuse4d/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "labelfuse4d/error.hpp"
#include "labelfuse4d/maxflow.hpp"

namespace lf4d {

void FusionWeights::validate() const {
  for (double w : {parser, flow, mask, parser_flow, smoothness, manual}) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorKind::kInvalid, "fusion weights must be finite and nonnegative");
  }
  if (!(manual > 0.0)) fail(ErrorKind::kInvalid, "manual weight must be positive");
}

LabelId UnaryTable::argmin(std::size_t v) const {
  const auto r = row(v);
  return static_cast<LabelId>(std::min_element(r.begin(), r.end()) - r.begin());
}

void accumulate_view(UnaryTable& table, const TriMesh& mesh, const RasterMap& map,
                     const ViewVotes& votes, const FusionWeights& weights, double view_norm) {
  const int num_labels = table.label_count();
  if (table.vertex_count() != mesh.vertices.size()) {
    fail(ErrorKind::kShape, "accumulate_view: unary table does not match the mesh");
  }
  for (const VoteImage* image : {votes.parser, votes.flow, votes.mask, votes.manual}) {
    if (image && (image->width() != map.width() || image->height() != map.height())) {
      fail(ErrorKind::kShape, std::string("accumulate_view: ") + to_string(image->source()) +
                                  " votes do not match the raster size");
    }
  }
  // Per pixel: barycentric-weighted mass (parser, flow) and unit-weighted
  // mass (mask, manual) for each label.
  std::vector<double> weighted(static_cast<std::size_t>(num_labels));
  std::vector<double> unit(static_cast<std::size_t>(num_labels));
  for (std::size_t p = 0; p < map.pixel_count(); ++p) {
    const std::int32_t f = map.face(p);
    if (f == kNoFace) continue;
    bool any = false;
    for (LabelId l = 0; l < num_labels; ++l) {
      double w = 0.0;
      double c = 0.0;
      if (votes.parser) w += weights.parser * votes.parser->vote(p, l);
      if (votes.flow) w += weights.flow * votes.flow->vote(p, l);
      if (votes.mask) c += weights.mask * votes.mask->vote(p, l);
      if (votes.manual) c += weights.manual * votes.manual->vote(p, l);
      weighted[static_cast<std::size_t>(l)] = w;
      unit[static_cast<std::size_t>(l)] = c;
      any = any || w != 0.0 || c != 0.0;
    }
    if (!any) continue;
    const Face& face = mesh.faces[static_cast<std::size_t>(f)];
    const auto& bary = map.barycentric(p);
    for (int k = 0; k < 3; ++k) {
      const auto vertex = static_cast<std::size_t>(face[k]);
      const double u = bary[k];
      for (LabelId l = 0; l < num_labels; ++l) {
        const auto li = static_cast<std::size_t>(l);
        table.at(vertex, l) -= (u * weighted[li] + unit[li]) * view_norm;
      }
    }
  }
}

UnaryTable accumulate_unary(const TriMesh& mesh, std::span<const RasterMap> maps,
                            std::span<const ViewVotes> votes, const FusionWeights& weights,
                            int num_labels) {
  if (maps.size() != votes.size()) {
    fail(ErrorKind::kShape, "accumulate_unary: " + std::to_string(maps.size()) + " raster maps but " +
                                std::to_string(votes.size()) + " vote sets");
  }
  if (num_labels <= 0) fail(ErrorKind::kInvalid, "accumulate_unary: no labels");
  UnaryTable table(mesh.vertices.size(), num_labels);
  if (maps.empty()) return table;
  const double view_norm = 1.0 / static_cast<double>(maps.size());
  for (std::size_t n = 0; n < maps.size(); ++n) {
    accumulate_view(table, mesh, maps[n], votes[n], weights, view_norm);
  }
  return table;
}

UnaryTable normalize_unary(const UnaryTable& raw) {
  UnaryTable out(raw.vertex_count(), raw.label_count());
  for (std::size_t v = 0; v < raw.vertex_count(); ++v) {
    const auto r = raw.row(v);
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    const double range = *hi - *lo;
    if (!(range > 0.0)) continue;
    for (LabelId l = 0; l < raw.label_count(); ++l) out.at(v, l) = (raw.at(v, l) - *lo) / range;
  }
  return out;
}

double energy_of(const EnergyProblem& problem, std::span<const LabelId> labels) {
  if (labels.size() != problem.unary.vertex_count()) {
    fail(ErrorKind::kShape, "energy_of: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(problem.unary.vertex_count()) + " vertices");
  }
  double energy = 0.0;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const LabelId l = labels[v];
    if (l < 0 || l >= problem.label_count()) {
      fail(ErrorKind::kInvalid, "energy_of: vertex " + std::to_string(v) + " has label " + std::to_string(l) +
                                    " outside the table");
    }
    energy += problem.unary.at(v, l);
  }
  for (const auto& [a, b] : problem.edges) {
    if (labels[static_cast<std::size_t>(a)] != labels[static_cast<std::size_t>(b)]) energy += problem.smoothness;
  }
  return energy;
}

namespace {

// Adds the pairwise term E(x_i, x_j) with E00=a, E01=b, E10=c, E11=d
// (x = 0 is the source side). Requires a + d <= b + c.
void add_pairwise(MaxFlowGraph& graph, std::int32_t i, std::int32_t j, double a, double b, double c, double d) {
  graph.add_tweights(i, d, a);
  b -= a;
  c -= d;
  if (b < 0.0) {
    graph.add_tweights(i, 0.0, b);
    graph.add_tweights(j, 0.0, -b);
    graph.add_edge(i, j, 0.0, b + c);
  } else if (c < 0.0) {
    graph.add_tweights(i, 0.0, -c);
    graph.add_tweights(j, 0.0, c);
    graph.add_edge(i, j, b + c, 0.0);
  } else {
    graph.add_edge(i, j, b, c);
  }
}

// Best labeling reachable from `labels` by switching any subset to alpha.
std::vector<LabelId> expansion_move(const EnergyProblem& problem, const std::vector<LabelId>& labels,
                                    LabelId alpha) {
  const std::size_t n = labels.size();
  MaxFlowGraph graph(n, problem.edges.size());
  for (std::size_t v = 0; v < n; ++v) {
    // x_v = 0 keeps the current label, x_v = 1 switches to alpha.
    const double keep = problem.unary.at(v, labels[v]);
    const double take = problem.unary.at(v, alpha);
    graph.add_tweights(static_cast<std::int32_t>(v), take, keep);
  }
  const double lambda = problem.smoothness;
  for (const auto& [a, b] : problem.edges) {
    const LabelId la = labels[static_cast<std::size_t>(a)];
    const LabelId lb = labels[static_cast<std::size_t>(b)];
    const double e00 = la != lb ? lambda : 0.0;
    const double e01 = la != alpha ? lambda : 0.0;
    const double e10 = alpha != lb ? lambda : 0.0;
    if (e00 == 0.0 && e01 == 0.0 && e10 == 0.0) continue;
    add_pairwise(graph, a, b, e00, e01, e10, 0.0);
  }
  graph.maxflow();
  std::vector<LabelId> out = labels;
  for (std::size_t v = 0; v < n; ++v) {
    if (graph.segment(static_cast<std::int32_t>(v)) == MaxFlowGraph::Segment::kSink) out[v] = alpha;
  }
  return out;
}

}  // namespace

ExpansionResult alpha_expansion(const EnergyProblem& problem, std::span<const LabelId> init,
                                const ExpansionOptions& options) {
  const int num_labels = problem.label_count();
  if (num_labels <= 0) fail(ErrorKind::kInvalid, "alpha_expansion: empty label set");
  if (init.size() != problem.unary.vertex_count()) {
    fail(ErrorKind::kShape, "alpha_expansion: init has " + std::to_string(init.size()) + " labels for " +
                                std::to_string(problem.unary.vertex_count()) + " vertices");
  }
  if (!std::isfinite(problem.smoothness) || problem.smoothness < 0.0) {
    fail(ErrorKind::kInvalid, "alpha_expansion: smoothness must be finite and nonnegative");
  }
  for (const auto& [a, b] : problem.edges) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= init.size() || static_cast<std::size_t>(b) >= init.size() || a == b) {
      fail(ErrorKind::kInvalid, "alpha_expansion: invalid edge");
    }
  }

  ExpansionResult result;
  result.labels.assign(init.begin(), init.end());
  for (std::size_t v = 0; v < result.labels.size(); ++v) {
    LabelId& l = result.labels[v];
    if (l == kBackground) {
      l = problem.unary.argmin(v);
    } else if (l < 0 || l >= num_labels) {
      fail(ErrorKind::kInvalid, "alpha_expansion: init label " + std::to_string(l) + " outside the label set");
    }
  }
  result.initial_energy = result.energy = energy_of(problem, result.labels);

  int move_index = 0;
  for (int pass = 0; pass < options.max_passes; ++pass) {
    ++result.passes;
    bool changed = false;
    for (LabelId alpha = 0; alpha < num_labels; ++alpha) {
      std::vector<LabelId> proposal = expansion_move(problem, result.labels, alpha);
      const double energy = energy_of(problem, proposal);
      // The current labeling is itself a feasible move, so an optimal move
      // can only exceed it by rounding.
      const double slack = 1e-9 * std::max(1.0, std::abs(result.energy));
      if (energy > result.energy + slack) {
        fail(ErrorKind::kInternal, "alpha_expansion: expansion move on label " + std::to_string(alpha) +
                                       " increased the energy");
      }
      ExpansionMove move{++move_index, alpha, result.energy, false};
      if (energy < result.energy && proposal != result.labels) {
        result.labels = std::move(proposal);
        result.energy = energy;
        move.energy = energy;
        move.accepted = true;
        changed = true;
      }
      result.trace.push_back(move);
    }
    if (!changed) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace lf4d
