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
#include <optional>
#include <span>
#include <vector>

#include "labelfuse4d/evidence.hpp"
#include "labelfuse4d/label_frame.hpp"
#include "labelfuse4d/mesh.hpp"
#include "labelfuse4d/raster.hpp"

namespace lf4d {

// Weights of the vertex energy. Parser and flow votes are additionally
// weighted by the barycentric coordinate of the vertex at each pixel; mask
// votes by 1; manual votes by `manual`.
struct FusionWeights {
  double parser = 0.5;       // on parser votes
  double flow = 0.5;         // on flow-transferred votes
  double mask = 1.0;         // on mask votes
  double parser_flow = 1.5;  // flow vs parser inside mask scores
  double smoothness = 1.0;   // Potts penalty per cut mesh edge
  double manual = 10.0;      // per manually corrected pixel

  // Throws kInvalid on negative or non-finite values, or manual <= 0.
  void validate() const;
};

// Dense N_vert x N_label table of per-vertex label costs.
class UnaryTable {
 public:
  UnaryTable() = default;
  UnaryTable(std::size_t vertices, int labels, double fill = 0.0)
      : vertices_(vertices), labels_(labels), data_(vertices * static_cast<std::size_t>(labels), fill) {}

  std::size_t vertex_count() const { return vertices_; }
  int label_count() const { return labels_; }
  double& at(std::size_t v, LabelId l) { return data_[v * static_cast<std::size_t>(labels_) + static_cast<std::size_t>(l)]; }
  double at(std::size_t v, LabelId l) const { return data_[v * static_cast<std::size_t>(labels_) + static_cast<std::size_t>(l)]; }
  std::span<const double> row(std::size_t v) const {
    return {data_.data() + v * static_cast<std::size_t>(labels_), static_cast<std::size_t>(labels_)};
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  // Label with the smallest cost (smallest id on ties).
  LabelId argmin(std::size_t v) const;

  bool operator==(const UnaryTable&) const = default;

 private:
  std::size_t vertices_ = 0;
  int labels_ = 0;
  std::vector<double> data_;
};

// Evidence of one view. Null members are absent sources and contribute
// nothing.
struct ViewVotes {
  const VoteImage* parser = nullptr;
  const VoteImage* flow = nullptr;
  const VoteImage* mask = nullptr;
  const VoteImage* manual = nullptr;
};

// Projects the per-pixel votes onto vertices. For vertex i and label l:
//   raw(i, l) = sum_n [ parser * E_par + flow * E_opt + mask * E_sam + E_man ] / N_view
// where E_X = -sum over covered pixels p whose face contains i of w_X * f_X(p, l),
// with w_par = w_opt = the barycentric coordinate of i at p, w_sam = 1 and
// w_man = weights.manual. N_view is maps.size().
UnaryTable accumulate_unary(const TriMesh& mesh, std::span<const RasterMap> maps,
                            std::span<const ViewVotes> votes, const FusionWeights& weights,
                            int num_labels);

// Adds one view's contribution (already divided by the view count through
// `view_norm`) to `table`.
void accumulate_view(UnaryTable& table, const TriMesh& mesh, const RasterMap& map,
                     const ViewVotes& votes, const FusionWeights& weights, double view_norm);

// Per-vertex min-max rescaling into [0, 1]; constant rows become all zero.
UnaryTable normalize_unary(const UnaryTable& raw);

// Multi-label problem with Potts smoothness over mesh edges.
struct EnergyProblem {
  UnaryTable unary;
  std::vector<Edge> edges;
  double smoothness = 1.0;

  int label_count() const { return unary.label_count(); }
};

// Sum of unary costs plus `smoothness` per edge whose endpoints disagree.
double energy_of(const EnergyProblem& problem, std::span<const LabelId> labels);

struct ExpansionMove {
  int index = 0;  // 1-based move counter
  LabelId label = 0;
  double energy = 0.0;  // after the move
  bool accepted = false;
};

struct ExpansionOptions {
  int max_passes = 10;
};

struct ExpansionResult {
  std::vector<LabelId> labels;
  double initial_energy = 0.0;
  double energy = 0.0;
  int passes = 0;
  bool converged = false;  // the last pass changed nothing
  std::vector<ExpansionMove> trace;
};

// Alpha-expansion: for alpha = 0, 1, ... (one pass) solves the binary
// "keep or switch to alpha" problem exactly by min-cut and accepts the move
// when it lowers the energy. Stops after a pass without change or after
// max_passes. Background (-1) entries of `init` start at their unary argmin.
ExpansionResult alpha_expansion(const EnergyProblem& problem, std::span<const LabelId> init,
                                const ExpansionOptions& options = {});

}  // namespace lf4d
