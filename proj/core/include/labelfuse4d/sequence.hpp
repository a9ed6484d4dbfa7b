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

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "labelfuse4d/manifest.hpp"
#include "labelfuse4d/pipeline.hpp"

namespace lf4d {

// File names under a sequence's output root. Round-2 artifacts carry an
// "_r2" suffix and live beside the round-1 files, which they never replace.
struct OutputLayout {
  std::filesystem::path root;

  std::filesystem::path labels(int frame, int round = 1) const;
  std::filesystem::path label_render(int frame, int view, int round = 1) const;
  std::filesystem::path rgb_render(int frame, int view) const;
  std::filesystem::path garment_dir(int frame) const;
  std::filesystem::path trace(int frame, int round = 1) const;
  std::filesystem::path state() const;
};

// Evidence files of one frame as laid out by the manifest. Missing files of
// an enabled source raise Error(kEvidence) naming frame, view, source and
// path; a missing manual overlay is an empty overlay.
class DiskEvidence final : public EvidenceSource {
 public:
  DiskEvidence(const SequenceManifest& manifest, int frame) : manifest_(&manifest), frame_(frame) {}

  VoteImage parser(int view) const override;
  FlowField flow(int view) const override;
  MaskSet masks(int view) const override;
  RectificationOverlay manual(int view) const override;

 private:
  const SequenceManifest* manifest_;
  int frame_;
};

struct FrameStatus {
  int index = 0;
  double energy = 0.0;     // final round
  std::size_t moved = 0;   // final round
  bool rectified = false;
  int prev_round = 0;      // round of frame index-1 that fed the flow votes (0: none)

  bool operator==(const FrameStatus&) const = default;
};

// Contents of state.json: the resume cursor plus everything needed to
// reproduce completed frames exactly.
struct RunState {
  RigParams rig;
  FusionWeights weights;
  SourceToggles toggles;
  std::vector<FrameStatus> frames;  // completed frames 1..n in order

  int last_completed() const { return static_cast<int>(frames.size()); }
  const FrameStatus* find(int frame) const;
};

std::string encode_run_state(const RunState& state);
RunState decode_run_state(std::string_view text, const std::string& origin = "<memory>");

struct RunOptions {
  bool resume = false;
  std::optional<int> stop_after;                       // last frame to process
  std::function<void(const FrameStatus&)> on_frame;   // progress callback
};

// Disk-backed driver: runs the pipeline frame by frame over a manifest,
// checkpointing every frame (write-then-rename) so readers never see partial
// files and interrupted runs resume where they stopped.
class SequenceRunner {
 public:
  SequenceRunner(SequenceManifest manifest, PipelineConfig config);

  const SequenceManifest& manifest() const { return manifest_; }
  const OutputLayout& layout() const { return layout_; }
  const PipelineConfig& config() const { return config_; }

  // The stored rig when state.json exists, else the manifest rig (fitted to
  // the sequence when no radius is given).
  ViewRig rig() const;

  // Frames 1..N (or from the resume cursor). With resume, the stored weights
  // and toggles take precedence over the constructor's.
  std::vector<FrameStatus> run(const RunOptions& options = {});

  // Second round for a completed frame from its manual/ overlays; with
  // `propagate`, frames k+1.. are reprocessed from the new labels.
  std::vector<FrameStatus> rectify(int frame, bool propagate = false);

  // Writes renders/{k}/{n}_rgb.png; returns the written paths. Frames without
  // vertex colors are skipped.
  std::vector<std::filesystem::path> render_rgb(const std::vector<int>& frames, const std::vector<int>& views) const;

  // Writes garments/{k}/{label}.ply from the final labels.
  std::vector<std::filesystem::path> extract(int frame) const;

  std::optional<RunState> state() const;
  LabelFrame final_labels(int frame) const;

 private:
  PipelineConfig stored_config(const RunState& state) const;
  ViewRig resolve_rig(const std::optional<RunState>& state) const;
  void write_round(const FrameRound& round, int frame, int round_index, const TriMesh& mesh) const;
  void clear_round2(int frame) const;
  void save_state(const RunState& state) const;
  // Re-reads state.json under the lock and replaces one frame's entry.
  void update_status(const FrameStatus& status) const;
  FrameStatus process(const PipelineConfig& config, const ViewRig& rig, int frame, const TriMesh& mesh,
                      const TriMesh* prev_mesh, const LabelFrame* prev_labels, int prev_round) const;

  SequenceManifest manifest_;
  PipelineConfig config_;
  OutputLayout layout_;
  mutable std::mutex state_mutex_;
};

}  // namespace lf4d
