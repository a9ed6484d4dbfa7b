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

#include "labelfuse4d/camera.hpp"
#include "labelfuse4d/energy.hpp"
#include "labelfuse4d/evidence.hpp"
#include "labelfuse4d/label_frame.hpp"
#include "labelfuse4d/mesh.hpp"
#include "labelfuse4d/raster.hpp"

namespace lf4d {

// Which automatic vote sources take part (ablation axes). The first frame
// always uses the parser only.
struct SourceToggles {
  bool parser = true;
  bool flow = true;
  bool mask = true;

  bool operator==(const SourceToggles&) const = default;
};

struct PipelineConfig {
  int num_labels = 6;
  FusionWeights weights;
  SourceToggles toggles;
  MaskFilterParams mask_filter;
  ExpansionOptions expansion;
  bool keep_renders = true;  // fill FrameRound::renders
};

// Per-view evidence of one frame. Implementations throw Error(kEvidence)
// naming the missing input.
class EvidenceSource {
 public:
  virtual ~EvidenceSource() = default;
  virtual VoteImage parser(int view) const = 0;
  virtual FlowField flow(int view) const = 0;
  virtual MaskSet masks(int view) const = 0;
  // Empty overlay when the view has no corrections.
  virtual RectificationOverlay manual(int view) const = 0;
};

// Evidence held in memory; a vector left empty means the source is absent.
struct MemoryEvidence final : EvidenceSource {
  std::vector<VoteImage> parser_views;
  std::vector<FlowField> flow_views;
  std::vector<MaskSet> mask_views;
  std::vector<RectificationOverlay> manual_views;

  VoteImage parser(int view) const override;
  FlowField flow(int view) const override;
  MaskSet masks(int view) const override;
  RectificationOverlay manual(int view) const override;
};

struct FrameRound {
  LabelFrame labels;
  std::vector<LabelImage> renders;  // one per view
  std::vector<ExpansionMove> trace;
  double initial_energy = 0.0;
  double energy = 0.0;
  std::size_t moved = 0;  // vertices whose label differs from the seed
};

struct FrameResult {
  int frame_index = 0;
  FrameRound round1;
  std::optional<FrameRound> round2;  // only after a non-empty rectification

  bool rectified() const { return round2.has_value(); }
  const FrameRound& final_round() const { return round2 ? *round2 : round1; }
  const LabelFrame& labels() const { return final_round().labels; }
};

// Frame k-1 as consumed by frame k: its mesh (as loaded, not recentered) and
// final labels.
struct PreviousFrame {
  const TriMesh* mesh = nullptr;
  const LabelFrame* labels = nullptr;
};

// Rig whose radius fits the largest recentered frame at 90% of the image
// height; other parameters from `params`.
ViewRig fit_rig(std::span<const TriMesh> meshes, RigParams params = {});

// Parser votes (and manual overlays present in `evidence`) plus smoothness.
FrameResult init_first_frame(const PipelineConfig& config, const ViewRig& rig, const TriMesh& mesh,
                             const EvidenceSource& evidence, int frame_index = 1);

// Frames k >= 2: parser, flow-warped labels of frame k-1 and mask votes as
// enabled by config.toggles; seeded with the warped labels.
FrameResult process_frame(const PipelineConfig& config, const ViewRig& rig, int frame_index,
                          const TriMesh& mesh, const EvidenceSource& evidence,
                          const PreviousFrame& previous);

// Second round: the round-1 energy plus manual votes from `overlays` (one per
// view, or fewer), seeded with the round-1 labels. `previous` must be the
// same frame that fed round 1 (null for the first frame). Empty overlays
// leave the result without a round 2. Throws kInvalid for corrections
// outside the image.
FrameResult rectify_frame(const PipelineConfig& config, const ViewRig& rig, const FrameResult& round1,
                          const TriMesh& mesh, const EvidenceSource& evidence,
                          const PreviousFrame* previous,
                          std::span<const RectificationOverlay> overlays);

// Frame 1 through init_first_frame, the rest through process_frame.
std::vector<FrameResult> run_sequence(const PipelineConfig& config, const ViewRig& rig,
                                      std::span<const TriMesh> meshes,
                                      std::span<const EvidenceSource* const> evidence);

struct GarmentMesh {
  LabelId label = 0;
  TriMesh mesh;
  std::vector<std::int32_t> vertex_map;  // garment vertex -> source vertex
  std::vector<std::int32_t> face_map;    // garment face -> source face
};

// Face label: majority of its three vertex labels; with three different
// labels, the label of the lowest-index vertex. One garment per label that
// owns at least one face, in ascending label order.
LabelId face_label(const Face& face, std::span<const LabelId> labels);
std::vector<GarmentMesh> extract_garments(const TriMesh& mesh, const LabelFrame& labels);

}  // namespace lf4d
