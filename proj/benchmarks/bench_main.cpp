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


// Hot paths: rasterization, alpha-expansion, Chamfer distance and one full
// first-frame fusion.

#include <cmath>
#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "labelfuse4d/energy.hpp"
#include "labelfuse4d/metrics.hpp"
#include "labelfuse4d/pipeline.hpp"

namespace {

using namespace lf4d;

// Latitude-longitude sphere with about 2 * rings * segments faces.
TriMesh uv_sphere(int rings, int segments) {
  TriMesh mesh;
  mesh.vertices.emplace_back(0.0, 1.0, 0.0);
  for (int r = 1; r < rings; ++r) {
    const double theta = std::numbers::pi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / segments;
      mesh.vertices.emplace_back(std::sin(theta) * std::cos(phi), std::cos(theta), std::sin(theta) * std::sin(phi));
    }
  }
  mesh.vertices.emplace_back(0.0, -1.0, 0.0);
  const auto at = [segments](int r, int s) { return 1 + (r - 1) * segments + (s % segments); };
  const int south = static_cast<int>(mesh.vertices.size()) - 1;
  for (int s = 0; s < segments; ++s) {
    mesh.faces.push_back({0, at(1, s + 1), at(1, s)});
    for (int r = 1; r + 1 < rings; ++r) {
      mesh.faces.push_back({at(r, s), at(r, s + 1), at(r + 1, s)});
      mesh.faces.push_back({at(r, s + 1), at(r + 1, s + 1), at(r + 1, s)});
    }
    mesh.faces.push_back({south, at(rings - 1, s), at(rings - 1, s + 1)});
  }
  return mesh;
}

ViewRig rig_for(const TriMesh& mesh, int size) {
  RigParams params;
  params.image_size = size;
  return fit_rig(std::span<const TriMesh>(&mesh, 1), params);
}

void BM_Rasterize(benchmark::State& state) {
  const TriMesh mesh = uv_sphere(128, 256);
  const ViewRig rig = rig_for(mesh, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(mesh, rig[0]));
  state.counters["faces"] = static_cast<double>(mesh.face_count());
}
BENCHMARK(BM_Rasterize)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_AlphaExpansion(benchmark::State& state) {
  const int rings = static_cast<int>(state.range(0));
  const TriMesh mesh = uv_sphere(rings, 2 * rings);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> cost(0.0, 1.0);
  UnaryTable unary(mesh.vertex_count(), 6);
  for (double& c : unary.data()) c = cost(rng);
  const EnergyProblem problem{normalize_unary(unary), build_adjacency(mesh).edges(), 1.0};
  const std::vector<LabelId> init(mesh.vertex_count(), kBackground);
  for (auto _ : state) benchmark::DoNotOptimize(alpha_expansion(problem, init));
  state.counters["vertices"] = static_cast<double>(mesh.vertex_count());
}
BENCHMARK(BM_AlphaExpansion)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Chamfer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const TriMesh mesh = uv_sphere(64, 128);
  const PointCloud x = sample_surface(mesh, n, 1);
  const PointCloud y = sample_surface(mesh, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(chamfer_squared(x, y));
}
BENCHMARK(BM_Chamfer)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FirstFrame(benchmark::State& state) {
  const TriMesh mesh = uv_sphere(96, 192);
  const ViewRig rig = rig_for(mesh, static_cast<int>(state.range(0)));
  LabelFrame truth{1, std::vector<LabelId>(mesh.vertex_count())};
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) truth.labels[v] = mesh.vertices[v].y() > 0.0 ? 3 : 4;
  MemoryEvidence evidence;
  for (const ViewCamera& camera : rig.cameras) {
    const RasterMap map = rasterize(mesh, camera);
    evidence.parser_views.push_back(VoteImage::hard(VoteSource::kParser, render_labels(map, mesh, truth)));
  }
  PipelineConfig config;
  config.keep_renders = false;
  for (auto _ : state) benchmark::DoNotOptimize(init_first_frame(config, rig, mesh, evidence));
  state.counters["vertices"] = static_cast<double>(mesh.vertex_count());
}
BENCHMARK(BM_FirstFrame)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
