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


#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "labelfuse4d/energy.hpp"
#include "labelfuse4d/maxflow.hpp"
#include "labelfuse4d/mesh.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

namespace lf4d {
namespace {

using testing::kind_of;
using testing::Rng;

// ---- max-flow -----------------------------------------------------------

TEST(MaxFlow, MatchesEdmondsKarpAndCutValue) {
  Rng rng(41);
  std::uniform_int_distribution<int> size(2, 30);
  std::uniform_real_distribution<double> cap(0.0, 5.0);
  std::bernoulli_distribution sparse(0.25);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    const int s = n, t = n + 1;
    std::vector<std::vector<double>> dense(static_cast<std::size_t>(n + 2), std::vector<double>(static_cast<std::size_t>(n + 2), 0.0));
    MaxFlowGraph g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double a = sparse(rng) ? cap(rng) : 0.0;
      const double b = sparse(rng) ? cap(rng) : 0.0;
      g.add_tweights(i, a, b);
      dense[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] += a;
      dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] += b;
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!sparse(rng)) continue;
        const double c = cap(rng), r = sparse(rng) ? cap(rng) : 0.0;
        g.add_edge(i, j, c, r);
        dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += c;
        dense[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] += r;
      }
    }
    const double flow = g.maxflow();
    EXPECT_NEAR(flow, oracle::edmonds_karp(dense, s, t), 1e-9);
    // The reported segmentation is a minimum cut.
    double cut = 0.0;
    auto side = [&](int v) {
      if (v == s) return MaxFlowGraph::Segment::kSource;
      if (v == t) return MaxFlowGraph::Segment::kSink;
      return g.segment(v);
    };
    for (int u = 0; u < n + 2; ++u) {
      for (int v = 0; v < n + 2; ++v) {
        if (side(u) == MaxFlowGraph::Segment::kSource && side(v) == MaxFlowGraph::Segment::kSink) {
          cut += dense[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
        }
      }
    }
    EXPECT_NEAR(cut, flow, 1e-9);
  }
}

TEST(MaxFlow, TerminalWeightsAccumulateAndRejectBadEdges) {
  MaxFlowGraph g(2);
  g.add_tweights(0, 3.0, 1.0);
  g.add_tweights(0, 0.0, 4.0);  // net: source 3, sink 5 -> constant 3, sink 2
  g.add_tweights(1, 2.0, 0.0);
  g.add_edge(0, 1, 1.0, 0.0);
  // Constant 3 plus the cheapest cut: node 0 sink-side, node 1 source-side,
  // which cuts nothing (the edge only runs 0 -> 1).
  EXPECT_NEAR(g.maxflow(), 3.0, 1e-12);
  EXPECT_EQ(g.segment(0), MaxFlowGraph::Segment::kSink);
  EXPECT_EQ(g.segment(1), MaxFlowGraph::Segment::kSource);
  MaxFlowGraph bad(2);
  EXPECT_EQ(kind_of([&] { bad.add_edge(0, 0, 1.0, 1.0); }), ErrorKind::kInvalid);
  EXPECT_EQ(kind_of([&] { bad.add_edge(0, 1, -1.0, 1.0); }), ErrorKind::kInvalid);
}

// ---- unary accumulation --------------------------------------------------

TriMesh one_triangle() {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(0, 1, 1)};
  m.faces = {{0, 1, 2}};
  return m;
}

TEST(AccumulateUnary, InvisibleVertexHasZeroRow) {
  TriMesh m = one_triangle();
  m.vertices.emplace_back(5, 5, 5);
  m.faces.push_back({1, 2, 3});
  std::vector<RasterMap> maps(2, RasterMap(2, 2));
  maps[0].set(0, 0, {0.2f, 0.3f, 0.5f}, 1.0f);
  const VoteImage par = VoteImage::hard(VoteSource::kParser, LabelImage(2, 2, 1));
  const std::vector<ViewVotes> votes(2, ViewVotes{&par, nullptr, nullptr, nullptr});
  const UnaryTable t = accumulate_unary(m, maps, votes, FusionWeights{}, 6);
  for (LabelId l = 0; l < 6; ++l) EXPECT_EQ(t.at(3, l), 0.0);
  EXPECT_LT(t.at(0, 1), 0.0);
}

TEST(AccumulateUnary, SingleTermByHand) {
  const TriMesh m = one_triangle();
  std::vector<RasterMap> maps(24, RasterMap(1, 1));
  maps[0].set(0, 0, {0.5f, 0.25f, 0.25f}, 1.0f);
  const VoteImage par = VoteImage::hard(VoteSource::kParser, LabelImage(1, 1, 3));
  std::vector<ViewVotes> votes(24);
  votes[0].parser = &par;
  const UnaryTable t = accumulate_unary(m, maps, votes, FusionWeights{}, 6);
  EXPECT_DOUBLE_EQ(t.at(0, 3), -0.5 * 0.5 / 24);
  EXPECT_DOUBLE_EQ(t.at(1, 3), -0.5 * 0.25 / 24);
  for (LabelId l = 0; l < 6; ++l) {
    if (l != 3) {
      EXPECT_EQ(t.at(0, l), 0.0);
    }
  }
}

TEST(AccumulateUnary, TetrahedronMatchesQuadrupleLoop) {
  Rng rng(43);
  const TriMesh tet = testing::tetrahedron();
  std::uniform_int_distribution<int> label(-1, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    std::vector<RasterMap> maps;
    std::vector<VoteImage> par, opt, sam, man;
    for (int n = 0; n < 2; ++n) {
      const Vec3 eye = Vec3(unit(rng) - 0.5, unit(rng) - 0.5, 1.0).normalized() * 4.0;
      const ViewCamera cam = look_at(eye, Vec3::Zero(), Vec3::UnitY(), 6.0, 8);
      maps.push_back(rasterize(tet, cam));
      LabelImage p(8, 8), o(8, 8), m(8, 8);
      for (auto& l : p.labels) l = static_cast<LabelId>(label(rng));
      for (auto& l : o.labels) l = static_cast<LabelId>(label(rng));
      m.at(3, 4) = 2;
      par.push_back(VoteImage::hard(VoteSource::kParser, p));
      opt.push_back(VoteImage::hard(VoteSource::kFlow, o));
      man.push_back(VoteImage::hard(VoteSource::kManual, m));
      VoteImage soft = VoteImage::soft(VoteSource::kMask, 8, 8, 6);
      for (std::size_t px = 0; px < 64; ++px) {
        for (LabelId l = 0; l < 6; ++l) soft.score(px, l) = unit(rng);
      }
      sam.push_back(std::move(soft));
    }
    ASSERT_GT(maps[0].covered_count(), 0u);
    std::vector<ViewVotes> votes;
    for (std::size_t n = 0; n < 2; ++n) votes.push_back({&par[n], &opt[n], &sam[n], &man[n]});
    const FusionWeights w;
    const UnaryTable got = accumulate_unary(tet, maps, votes, w, 6);
    const auto want = oracle::unary(tet, maps, votes, w, 6);
    for (std::size_t v = 0; v < 4; ++v) {
      for (LabelId l = 0; l < 6; ++l) EXPECT_NEAR(got.at(v, l), want[v][static_cast<std::size_t>(l)], 1e-12);
    }
  }
}

TEST(AccumulateUnary, ShapeErrors) {
  const TriMesh m = one_triangle();
  std::vector<RasterMap> maps(2, RasterMap(2, 2));
  const VoteImage wrong = VoteImage::hard(VoteSource::kParser, LabelImage(3, 3, 1));
  std::vector<ViewVotes> one(1);
  EXPECT_EQ(kind_of([&] { accumulate_unary(m, maps, one, FusionWeights{}, 6); }), ErrorKind::kShape);
  std::vector<ViewVotes> bad(2, ViewVotes{&wrong, nullptr, nullptr, nullptr});
  EXPECT_EQ(kind_of([&] { accumulate_unary(m, maps, bad, FusionWeights{}, 6); }), ErrorKind::kShape);
  EXPECT_EQ(kind_of([&] { accumulate_unary(m, maps, std::vector<ViewVotes>(2), FusionWeights{}, 0); }),
            ErrorKind::kInvalid);
}

TEST(FusionWeights, DefaultsAndValidation) {
  const FusionWeights w;
  EXPECT_EQ(w.parser, 0.5);
  EXPECT_EQ(w.flow, 0.5);
  EXPECT_EQ(w.parser_flow, 1.5);
  EXPECT_EQ(w.mask, 1.0);
  EXPECT_EQ(w.smoothness, 1.0);
  EXPECT_EQ(w.manual, 10.0);
  EXPECT_NO_THROW(w.validate());
  FusionWeights bad;
  bad.flow = -0.1;
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::kInvalid);
  bad = FusionWeights{};
  bad.manual = 0.0;
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::kInvalid);
}

// ---- normalization ---------------------------------------------------

TEST(NormalizeUnary, MinMaxRows) {
  UnaryTable raw(3, 3);
  raw.at(0, 0) = -4;
  raw.at(0, 1) = -1;
  raw.at(0, 2) = 0;
  raw.at(1, 0) = raw.at(1, 1) = raw.at(1, 2) = -2.5;
  const UnaryTable n = normalize_unary(raw);
  EXPECT_EQ(n.at(0, 0), 0.0);
  EXPECT_EQ(n.at(0, 1), 0.75);
  EXPECT_EQ(n.at(0, 2), 1.0);
  for (LabelId l = 0; l < 3; ++l) {
    EXPECT_EQ(n.at(1, l), 0.0);
    EXPECT_EQ(n.at(2, l), 0.0);
  }
}

TEST(NormalizeUnary, KeepsArgminAndLambdaZeroSolution) {
  Rng rng(44);
  std::uniform_real_distribution<double> d(-10.0, 3.0);
  UnaryTable raw(300, 6);
  for (double& c : raw.data()) c = d(rng);
  const UnaryTable n = normalize_unary(raw);
  for (std::size_t v = 0; v < 300; ++v) {
    EXPECT_EQ(n.argmin(v), raw.argmin(v));
    const auto row = n.row(v);
    EXPECT_EQ(*std::min_element(row.begin(), row.end()), 0.0);
    EXPECT_LE(*std::max_element(row.begin(), row.end()), 1.0);
  }
  EnergyProblem a{raw, {{0, 1}, {1, 2}}, 0.0};
  EnergyProblem b{n, {{0, 1}, {1, 2}}, 0.0};
  const std::vector<LabelId> init(300, 0);
  EXPECT_EQ(alpha_expansion(a, init).labels, alpha_expansion(b, init).labels);
}

// ---- energy and expansion -----------------------------------------------

TEST(EnergyOf, Examples) {
  UnaryTable u(3, 6, 0.0);
  u.at(0, 3) = 0.25;
  u.at(1, 3) = 0.5;
  u.at(2, 4) = 0.125;
  const TriMesh tri = one_triangle();
  EnergyProblem p{u, build_adjacency(tri).edges(), 1.0};
  EXPECT_EQ(energy_of(p, std::vector<LabelId>{3, 3, 3}), 0.75);
  EXPECT_EQ(energy_of(p, std::vector<LabelId>{3, 3, 4}), 0.875 + 2.0);
  EXPECT_EQ(kind_of([&] { energy_of(p, std::vector<LabelId>{3, 3}); }), ErrorKind::kShape);
  EXPECT_EQ(kind_of([&] { energy_of(p, std::vector<LabelId>{3, 3, 6}); }), ErrorKind::kInvalid);

  Rng rng(45);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::uniform_int_distribution<int> l(0, 5);
  const TriMesh sphere = testing::icosphere(1);
  EnergyProblem q{UnaryTable(sphere.vertex_count(), 6), build_adjacency(sphere).edges(), 0.7};
  for (double& c : q.unary.data()) c = d(rng);
  for (int s = 0; s < 20; ++s) {
    std::vector<LabelId> labels(sphere.vertex_count());
    for (auto& x : labels) x = static_cast<LabelId>(l(rng));
    EXPECT_NEAR(energy_of(q, labels), oracle::energy(q.unary, q.edges, q.smoothness, labels), 1e-12);
  }
}

TEST(AlphaExpansion, DecoupledProblemTakesArgmin) {
  Rng rng(46);
  // Unseeded (-1) vertices start at the argmin, smaller id on ties.
  std::uniform_int_distribution<int> d(0, 3);
  UnaryTable tied(50, 4);
  for (double& c : tied.data()) c = d(rng);
  const EnergyProblem p{tied, {{0, 1}, {2, 3}}, 0.0};
  const ExpansionResult r = alpha_expansion(p, std::vector<LabelId>(50, kBackground));
  for (std::size_t v = 0; v < 50; ++v) EXPECT_EQ(r.labels[v], tied.argmin(v));
  // From any seed when the argmin is unique.
  std::uniform_real_distribution<double> c(0.0, 1.0);
  UnaryTable distinct(50, 4);
  for (double& x : distinct.data()) x = c(rng);
  const EnergyProblem q{distinct, {{0, 1}, {2, 3}}, 0.0};
  const ExpansionResult s = alpha_expansion(q, std::vector<LabelId>(50, 3));
  for (std::size_t v = 0; v < 50; ++v) EXPECT_EQ(s.labels[v], distinct.argmin(v));
}

TEST(AlphaExpansion, TiesKeepTheCurrentLabel) {
  // Moves must strictly lower the energy, so a tied vertex is not moved.
  UnaryTable u(1, 3, 0.0);
  const EnergyProblem p{u, {}, 1.0};
  const ExpansionResult r = alpha_expansion(p, std::vector<LabelId>{2});
  EXPECT_EQ(r.labels, std::vector<LabelId>{2});
  EXPECT_TRUE(r.converged);
}

TEST(AlphaExpansion, TwoVerticesFavoringThree) {
  UnaryTable u(2, 6, 1.0);
  u.at(0, 3) = 0.0;
  u.at(1, 3) = 0.0;
  u.at(1, 4) = 0.5;
  const EnergyProblem p{u, {{0, 1}}, 1.0};
  EXPECT_EQ(alpha_expansion(p, std::vector<LabelId>{0, 4}).labels, (std::vector<LabelId>{3, 3}));
}

TEST(AlphaExpansion, BackgroundInitUsesArgminAndTraceStartsThere) {
  UnaryTable u(3, 3, 1.0);
  u.at(0, 2) = 0.0;
  u.at(1, 1) = 0.0;
  u.at(2, 1) = 0.0;
  const EnergyProblem p{u, {}, 1.0};
  const ExpansionResult r = alpha_expansion(p, std::vector<LabelId>{-1, -1, 0});
  EXPECT_EQ(r.labels, (std::vector<LabelId>{2, 1, 1}));
  // Seeds 2, 1, 0 -> energy 1; expansion on 1 fixes vertex 2.
  EXPECT_EQ(r.initial_energy, 1.0);
  EXPECT_EQ(r.energy, 0.0);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front().index, 1);
  EXPECT_EQ(r.trace.front().label, 0);
}

TEST(AlphaExpansion, ExactForTwoLabelsAndWithinBoundForMore) {
  Rng rng(47);
  std::uniform_int_distribution<int> size(1, 9);
  std::uniform_real_distribution<double> cost(0.0, 1.0);
  std::bernoulli_distribution edge(0.4);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng);
    const int labels = trial % 2 == 0 ? 2 : 3;
    EnergyProblem p{UnaryTable(static_cast<std::size_t>(n), labels), {}, cost(rng)};
    for (double& c : p.unary.data()) c = cost(rng);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (edge(rng)) p.edges.emplace_back(i, j);
      }
    }
    const ExpansionResult r = alpha_expansion(p, std::vector<LabelId>(static_cast<std::size_t>(n), 0));
    const double best = oracle::exhaustive_minimum(p.unary, p.edges, p.smoothness);
    if (labels == 2) {
      EXPECT_NEAR(r.energy, best, 1e-12);
    } else {
      // Potts: within a factor 2 of the optimum (nonnegative energies).
      EXPECT_LE(r.energy, 2.0 * best + 1e-12);
      EXPECT_GE(r.energy, best - 1e-12);
    }
  }
}

TEST(AlphaExpansion, ScaleCovarianceAndDeterminism) {
  Rng rng(48);
  std::uniform_real_distribution<double> cost(0.0, 1.0);
  const TriMesh sphere = testing::icosphere(2);
  EnergyProblem p{UnaryTable(sphere.vertex_count(), 5), build_adjacency(sphere).edges(), 0.3};
  for (double& c : p.unary.data()) c = cost(rng);
  const std::vector<LabelId> init(sphere.vertex_count(), 0);
  const ExpansionResult a = alpha_expansion(p, init);
  EnergyProblem scaled = p;
  for (double& c : scaled.unary.data()) c *= 4.0;  // power of two: exact
  scaled.smoothness *= 4.0;
  EXPECT_EQ(alpha_expansion(scaled, init).labels, a.labels);
  const ExpansionResult again = alpha_expansion(p, init);
  EXPECT_EQ(again.labels, a.labels);
  EXPECT_EQ(again.trace.size(), a.trace.size());
  // Energy matches an independent evaluation; stable under another pass.
  EXPECT_NEAR(a.energy, oracle::energy(p.unary, p.edges, p.smoothness, a.labels), 1e-9);
  const ExpansionResult stable = alpha_expansion(p, a.labels, ExpansionOptions{1});
  EXPECT_EQ(stable.labels, a.labels);
  EXPECT_TRUE(std::none_of(stable.trace.begin(), stable.trace.end(), [](const ExpansionMove& m) { return m.accepted; }));
}

TEST(AlphaExpansion, Errors) {
  const EnergyProblem empty{UnaryTable(2, 0), {}, 1.0};
  EXPECT_EQ(kind_of([&] { alpha_expansion(empty, std::vector<LabelId>{0, 0}); }), ErrorKind::kInvalid);
  const EnergyProblem p{UnaryTable(2, 2), {{0, 5}}, 1.0};
  EXPECT_EQ(kind_of([&] { alpha_expansion(p, std::vector<LabelId>{0, 0}); }), ErrorKind::kInvalid);
  const EnergyProblem q{UnaryTable(2, 2), {}, 1.0};
  EXPECT_EQ(kind_of([&] { alpha_expansion(q, std::vector<LabelId>{0}); }), ErrorKind::kShape);
  EXPECT_EQ(kind_of([&] { alpha_expansion(q, std::vector<LabelId>{0, 2}); }), ErrorKind::kInvalid);
}

}  // namespace
}  // namespace lf4d
