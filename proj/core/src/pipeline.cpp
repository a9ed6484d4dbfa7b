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


#include "labelfuse4d/pipeline.hpp"

#include <algorithm>
#include <string>

#include "labelfuse4d/error.hpp"

namespace lf4d {
namespace {

template <typename T>
const T& view_entry(const std::vector<T>& items, int view, const char* what) {
  if (view < 0 || static_cast<std::size_t>(view) >= items.size()) {
    fail(ErrorKind::kEvidence, std::string("no ") + what + " evidence for view " + std::to_string(view));
  }
  return items[static_cast<std::size_t>(view)];
}

struct ViewInputs {
  std::optional<VoteImage> parser;
  std::optional<VoteImage> flow;
  std::optional<VoteImage> mask;
  std::optional<VoteImage> manual;
};

struct UnaryBuild {
  TriMesh centered;
  std::vector<RasterMap> maps;
  UnaryTable raw;
  std::vector<LabelId> seed;  // kBackground where there is no temporal prior
};

enum class Stage { kFirst, kTemporal };

// Rasterizes the frame, gathers every enabled vote source view by view and
// accumulates the raw unary table.
UnaryBuild build_unary(const PipelineConfig& config, const ViewRig& rig, Stage stage,
                       const TriMesh& mesh, const EvidenceSource& evidence,
                       const PreviousFrame* previous,
                       std::span<const RectificationOverlay> overlays) {
  UnaryBuild out;
  out.centered = recenter(mesh).mesh;
  const std::size_t nv = out.centered.vertex_count();
  const int L = config.num_labels;
  out.raw = UnaryTable(nv, L);
  out.maps.reserve(rig.size());

  const bool temporal = stage == Stage::kTemporal;
  const bool use_flow = temporal && config.toggles.flow;
  const bool use_mask = temporal && config.toggles.mask;
  std::optional<TriMesh> prev_centered;
  if (use_flow) {
    if (!previous || !previous->mesh || !previous->labels) {
      fail(ErrorKind::kInvalid, "flow votes need the previous frame");
    }
    if (previous->labels->size() != previous->mesh->vertex_count()) {
      fail(ErrorKind::kShape, "previous labels do not match the previous mesh");
    }
    prev_centered = recenter(*previous->mesh).mesh;
  }

  UnaryTable flow_mass;
  FusionWeights flow_only{};
  if (use_flow) {
    flow_mass = UnaryTable(nv, L);
    flow_only = FusionWeights{0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
  }

  const double view_norm = rig.size() ? 1.0 / static_cast<double>(rig.size()) : 0.0;
  for (std::size_t n = 0; n < rig.size(); ++n) {
    const int view = static_cast<int>(n);
    const ViewCamera& camera = rig[n];
    RasterMap map = rasterize(out.centered, camera);
    ViewInputs in;
    if (config.toggles.parser) {
      in.parser = evidence.parser(view);
      if (in.parser->width() != camera.width || in.parser->height() != camera.height) {
        fail(ErrorKind::kShape, "parser votes of view " + std::to_string(view) + " are " +
                                    std::to_string(in.parser->width()) + "x" +
                                    std::to_string(in.parser->height()) + ", camera is " +
                                    std::to_string(camera.width) + "x" + std::to_string(camera.height));
      }
    }
    if (use_flow) {
      const RasterMap prev_map = rasterize(*prev_centered, camera);
      const LabelImage prev_labels = render_labels(prev_map, *prev_centered, *previous->labels);
      in.flow = warp_labels(prev_labels, evidence.flow(view));
    }
    if (use_mask) {
      const MaskSet masks = filter_masks(evidence.masks(view), map, config.mask_filter);
      const VoteImage no_parser =
          in.parser ? VoteImage{} : VoteImage::hard(VoteSource::kParser, LabelImage(camera.width, camera.height));
      in.mask = sam_votes(masks, in.parser ? *in.parser : no_parser, in.flow ? &*in.flow : nullptr,
                          config.weights.parser_flow, L);
    }
    if (n < overlays.size() && !overlays[n].empty()) {
      in.manual = manual_votes(overlays[n], camera.width, camera.height);
    }
    const ViewVotes votes{in.parser ? &*in.parser : nullptr, in.flow ? &*in.flow : nullptr,
                          in.mask ? &*in.mask : nullptr, in.manual ? &*in.manual : nullptr};
    accumulate_view(out.raw, out.centered, map, votes, config.weights, view_norm);
    if (use_flow) {
      accumulate_view(flow_mass, out.centered, map, ViewVotes{nullptr, &*in.flow, nullptr, nullptr}, flow_only,
                      1.0);
    }
    out.maps.push_back(std::move(map));
  }

  out.seed.assign(nv, kBackground);
  if (use_flow) {
    for (std::size_t v = 0; v < nv; ++v) {
      const LabelId best = flow_mass.argmin(v);
      if (flow_mass.at(v, best) < 0.0) out.seed[v] = best;
    }
  }
  return out;
}

FrameRound solve(const PipelineConfig& config, const UnaryBuild& build, std::span<const LabelId> seed,
                 int frame_index) {
  EnergyProblem problem{normalize_unary(build.raw), build_adjacency(build.centered).edges(),
                        config.weights.smoothness};
  ExpansionResult result = alpha_expansion(problem, seed, config.expansion);

  FrameRound round;
  round.initial_energy = result.initial_energy;
  round.energy = result.energy;
  round.trace = std::move(result.trace);
  for (std::size_t v = 0; v < seed.size(); ++v) {
    const LabelId start = seed[v] >= 0 ? seed[v] : problem.unary.argmin(v);
    if (result.labels[v] != start) ++round.moved;
  }
  round.labels = LabelFrame{frame_index, std::move(result.labels)};
  if (config.keep_renders) {
    round.renders.reserve(build.maps.size());
    for (const RasterMap& map : build.maps) {
      round.renders.push_back(render_labels(map, build.centered, round.labels));
    }
  }
  return round;
}

std::vector<RectificationOverlay> stored_overlays(const EvidenceSource& evidence, std::size_t views) {
  std::vector<RectificationOverlay> out(views);
  for (std::size_t n = 0; n < views; ++n) out[n] = evidence.manual(static_cast<int>(n));
  return out;
}

void check_config(const PipelineConfig& config, const ViewRig& rig) {
  if (config.num_labels <= 0) fail(ErrorKind::kInvalid, "pipeline: empty label set");
  if (rig.size() == 0) fail(ErrorKind::kInvalid, "pipeline: rig has no cameras");
  config.weights.validate();
}

}  // namespace

VoteImage MemoryEvidence::parser(int view) const { return view_entry(parser_views, view, "parser"); }
FlowField MemoryEvidence::flow(int view) const { return view_entry(flow_views, view, "flow"); }
MaskSet MemoryEvidence::masks(int view) const { return view_entry(mask_views, view, "mask"); }
RectificationOverlay MemoryEvidence::manual(int view) const {
  if (view < 0 || static_cast<std::size_t>(view) >= manual_views.size()) return {};
  return manual_views[static_cast<std::size_t>(view)];
}

ViewRig fit_rig(std::span<const TriMesh> meshes, RigParams params) {
  double radius = 0.0;
  for (const TriMesh& mesh : meshes) radius = std::max(radius, bounding_radius(recenter(mesh).mesh));
  if (!(radius > 0.0)) fail(ErrorKind::kInvalid, "fit_rig: meshes have zero extent");
  const double focal = params.focal > 0.0 ? params.focal : default_focal(params.image_size);
  params.radius = fit_rig_radius(radius, params.image_size, focal);
  return build_rig(params);
}

FrameResult init_first_frame(const PipelineConfig& config, const ViewRig& rig, const TriMesh& mesh,
                             const EvidenceSource& evidence, int frame_index) {
  check_config(config, rig);
  const auto overlays = stored_overlays(evidence, rig.size());
  const UnaryBuild build = build_unary(config, rig, Stage::kFirst, mesh, evidence, nullptr, overlays);
  FrameResult result;
  result.frame_index = frame_index;
  result.round1 = solve(config, build, build.seed, frame_index);
  return result;
}

FrameResult process_frame(const PipelineConfig& config, const ViewRig& rig, int frame_index,
                          const TriMesh& mesh, const EvidenceSource& evidence,
                          const PreviousFrame& previous) {
  check_config(config, rig);
  const UnaryBuild build = build_unary(config, rig, Stage::kTemporal, mesh, evidence, &previous, {});
  FrameResult result;
  result.frame_index = frame_index;
  result.round1 = solve(config, build, build.seed, frame_index);
  return result;
}

FrameResult rectify_frame(const PipelineConfig& config, const ViewRig& rig, const FrameResult& round1,
                          const TriMesh& mesh, const EvidenceSource& evidence,
                          const PreviousFrame* previous,
                          std::span<const RectificationOverlay> overlays) {
  check_config(config, rig);
  if (round1.round1.labels.size() != mesh.vertex_count()) {
    fail(ErrorKind::kShape, "rectify_frame: round-1 labels do not match the mesh");
  }
  for (std::size_t n = 0; n < overlays.size() && n < rig.size(); ++n) {
    for (const Correction& c : overlays[n].corrections) {
      if (c.x < 0 || c.y < 0 || c.x >= rig[n].width || c.y >= rig[n].height) {
        fail(ErrorKind::kInvalid, "view " + std::to_string(n) + ": correction at (" + std::to_string(c.x) +
                                      ", " + std::to_string(c.y) + ") is outside the image");
      }
      if (c.label >= config.num_labels || c.label < kBackground) {
        fail(ErrorKind::kInvalid, "view " + std::to_string(n) + ": correction label " +
                                      std::to_string(c.label) + " is not registered");
      }
    }
  }
  FrameResult result;
  result.frame_index = round1.frame_index;
  result.round1 = round1.round1;
  const bool any = std::any_of(overlays.begin(), overlays.end(),
                               [](const RectificationOverlay& o) { return !o.empty(); });
  if (!any) return result;

  const Stage stage = previous ? Stage::kTemporal : Stage::kFirst;
  const UnaryBuild build = build_unary(config, rig, stage, mesh, evidence, previous, overlays);
  result.round2 = solve(config, build, round1.round1.labels.labels, round1.frame_index);
  return result;
}

std::vector<FrameResult> run_sequence(const PipelineConfig& config, const ViewRig& rig,
                                      std::span<const TriMesh> meshes,
                                      std::span<const EvidenceSource* const> evidence) {
  if (meshes.size() != evidence.size()) {
    fail(ErrorKind::kInvalid, "run_sequence: " + std::to_string(meshes.size()) + " meshes but " +
                                  std::to_string(evidence.size()) + " evidence sets");
  }
  std::vector<FrameResult> results;
  results.reserve(meshes.size());
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    if (i == 0) {
      results.push_back(init_first_frame(config, rig, meshes[0], *evidence[0], k));
    } else {
      const PreviousFrame previous{&meshes[i - 1], &results.back().labels()};
      results.push_back(process_frame(config, rig, k, meshes[i], *evidence[i], previous));
    }
  }
  return results;
}

LabelId face_label(const Face& face, std::span<const LabelId> labels) {
  const LabelId a = labels[static_cast<std::size_t>(face[0])];
  const LabelId b = labels[static_cast<std::size_t>(face[1])];
  const LabelId c = labels[static_cast<std::size_t>(face[2])];
  if (a == b || a == c) return a;
  if (b == c) return b;
  const auto lowest = std::min_element(face.begin(), face.end());
  return labels[static_cast<std::size_t>(*lowest)];
}

std::vector<GarmentMesh> extract_garments(const TriMesh& mesh, const LabelFrame& labels) {
  if (labels.size() != mesh.vertex_count()) {
    fail(ErrorKind::kShape, "extract_garments: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(mesh.vertex_count()) + " vertices");
  }
  LabelId max_label = kBackground;
  for (LabelId l : labels.labels) {
    if (l < 0) fail(ErrorKind::kInvalid, "extract_garments: labels contain background entries");
    max_label = std::max(max_label, l);
  }
  const std::size_t num_labels = static_cast<std::size_t>(max_label + 1);
  std::vector<std::vector<std::int32_t>> faces_of(num_labels);
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    faces_of[static_cast<std::size_t>(face_label(mesh.faces[f], labels.labels))].push_back(
        static_cast<std::int32_t>(f));
  }
  std::vector<GarmentMesh> out;
  std::vector<std::int32_t> remap(mesh.vertex_count(), -1);
  for (std::size_t l = 0; l < num_labels; ++l) {
    if (faces_of[l].empty()) continue;
    GarmentMesh g;
    g.label = static_cast<LabelId>(l);
    g.face_map = faces_of[l];
    std::fill(remap.begin(), remap.end(), -1);
    for (std::int32_t f : faces_of[l]) {
      Face out_face{};
      for (int k = 0; k < 3; ++k) {
        const std::int32_t v = mesh.faces[static_cast<std::size_t>(f)][static_cast<std::size_t>(k)];
        std::int32_t& r = remap[static_cast<std::size_t>(v)];
        if (r < 0) {
          r = static_cast<std::int32_t>(g.vertex_map.size());
          g.vertex_map.push_back(v);
          g.mesh.vertices.push_back(mesh.vertices[static_cast<std::size_t>(v)]);
          if (mesh.has_colors()) g.mesh.colors.push_back(mesh.colors[static_cast<std::size_t>(v)]);
        }
        out_face[static_cast<std::size_t>(k)] = r;
      }
      g.mesh.faces.push_back(out_face);
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace lf4d
