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


#include "labelfuse4d/sequence.hpp"

#include <sstream>

#include <json.hpp>

#include "labelfuse4d/error.hpp"
#include "labelfuse4d/evidence_io.hpp"
#include "labelfuse4d/fs_util.hpp"
#include "labelfuse4d/image_io.hpp"
#include "labelfuse4d/mesh_io.hpp"

namespace lf4d {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string suffix(int round) { return round == 2 ? "_r2" : ""; }

fs::path require(const fs::path& path, int frame, int view, const char* source) {
  if (!fs::exists(path)) {
    fail(ErrorKind::kEvidence, "frame " + std::to_string(frame) + " view " + std::to_string(view) + ": missing " +
                                   source + " evidence " + path.string());
  }
  return path;
}

std::string trace_csv(const std::vector<ExpansionMove>& trace, double initial_energy) {
  std::ostringstream out;
  out.precision(17);
  out << "move,label,energy,accepted\n";
  out << "0,-1," << initial_energy << ",1\n";
  for (const ExpansionMove& m : trace) {
    out << m.index << ',' << m.label << ',' << m.energy << ',' << (m.accepted ? 1 : 0) << '\n';
  }
  return out.str();
}

json weights_json(const FusionWeights& w) {
  return {{"lambda_p", w.parser},     {"lambda_o", w.flow},       {"lambda_s", w.mask},
          {"lambda_po", w.parser_flow}, {"lambda_b", w.smoothness}, {"w_man", w.manual}};
}

}  // namespace

fs::path OutputLayout::labels(int frame, int round) const {
  return root / "labels" / (std::to_string(frame) + suffix(round) + ".l4dl");
}
fs::path OutputLayout::label_render(int frame, int view, int round) const {
  return root / "renders" / std::to_string(frame) / (std::to_string(view) + "_label" + suffix(round) + ".png");
}
fs::path OutputLayout::rgb_render(int frame, int view) const {
  return root / "renders" / std::to_string(frame) / (std::to_string(view) + "_rgb.png");
}
fs::path OutputLayout::garment_dir(int frame) const { return root / "garments" / std::to_string(frame); }
fs::path OutputLayout::trace(int frame, int round) const {
  return root / "trace" / (std::to_string(frame) + suffix(round) + ".csv");
}
fs::path OutputLayout::state() const { return root / "state.json"; }

VoteImage DiskEvidence::parser(int view) const {
  const fs::path path = require(manifest_->parser_path(frame_, view), frame_, view, "parser");
  return load_parser_votes(path, manifest_->registry, manifest_->class_map);
}

FlowField DiskEvidence::flow(int view) const {
  return read_flo(require(manifest_->flow_path(frame_, view), frame_, view, "flow"));
}

MaskSet DiskEvidence::masks(int view) const {
  return read_masks(require(manifest_->masks_path(frame_, view), frame_, view, "mask"));
}

RectificationOverlay DiskEvidence::manual(int view) const {
  const fs::path path = manifest_->manual_path(frame_, view);
  if (!fs::exists(path)) return {};
  return read_overlay(path);
}

const FrameStatus* RunState::find(int frame) const {
  if (frame < 1 || frame > last_completed()) return nullptr;
  return &frames[static_cast<std::size_t>(frame - 1)];
}

std::string encode_run_state(const RunState& state) {
  json doc;
  doc["version"] = 1;
  doc["rig"] = {{"radius", state.rig.radius},
                {"elevation_deg", state.rig.elevation_deg},
                {"image_size", state.rig.image_size},
                {"focal", state.rig.focal}};
  doc["weights"] = weights_json(state.weights);
  doc["toggles"] = {{"par", state.toggles.parser}, {"opt", state.toggles.flow}, {"sam", state.toggles.mask}};
  json frames = json::array();
  for (const FrameStatus& f : state.frames) {
    frames.push_back({{"index", f.index},
                      {"energy", f.energy},
                      {"moved", f.moved},
                      {"rectified", f.rectified},
                      {"prev_round", f.prev_round}});
  }
  doc["frames"] = frames;
  doc["completed"] = state.last_completed();
  return doc.dump(2) + "\n";
}

RunState decode_run_state(std::string_view text, const std::string& origin) {
  RunState state;
  try {
    const json doc = json::parse(text);
    const json& rig = doc.at("rig");
    state.rig.radius = rig.at("radius").get<double>();
    state.rig.elevation_deg = rig.at("elevation_deg").get<double>();
    state.rig.image_size = rig.at("image_size").get<int>();
    state.rig.focal = rig.at("focal").get<double>();
    const json& w = doc.at("weights");
    state.weights.parser = w.at("lambda_p").get<double>();
    state.weights.flow = w.at("lambda_o").get<double>();
    state.weights.mask = w.at("lambda_s").get<double>();
    state.weights.parser_flow = w.at("lambda_po").get<double>();
    state.weights.smoothness = w.at("lambda_b").get<double>();
    state.weights.manual = w.at("w_man").get<double>();
    const json& t = doc.at("toggles");
    state.toggles = {t.at("par").get<bool>(), t.at("opt").get<bool>(), t.at("sam").get<bool>()};
    for (const json& f : doc.at("frames")) {
      FrameStatus s;
      s.index = f.at("index").get<int>();
      s.energy = f.at("energy").get<double>();
      s.moved = f.at("moved").get<std::size_t>();
      s.rectified = f.at("rectified").get<bool>();
      s.prev_round = f.at("prev_round").get<int>();
      if (s.index != static_cast<int>(state.frames.size()) + 1) {
        fail(ErrorKind::kParse, origin + ": frame entries must be consecutive from 1");
      }
      state.frames.push_back(s);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, origin + ": " + e.what());
  }
  return state;
}

SequenceRunner::SequenceRunner(SequenceManifest manifest, PipelineConfig config)
    : manifest_(std::move(manifest)), config_(std::move(config)), layout_{manifest_.output_root} {
  config_.num_labels = manifest_.registry.size();
  config_.weights.validate();
}

std::optional<RunState> SequenceRunner::state() const {
  std::lock_guard lock(state_mutex_);
  const fs::path path = layout_.state();
  if (!fs::exists(path)) return std::nullopt;
  return decode_run_state(read_file(path), path.string());
}

void SequenceRunner::save_state(const RunState& state) const {
  std::lock_guard lock(state_mutex_);
  write_file_atomic(layout_.state(), encode_run_state(state));
}

void SequenceRunner::update_status(const FrameStatus& status) const {
  std::lock_guard lock(state_mutex_);
  RunState state = decode_run_state(read_file(layout_.state()), layout_.state().string());
  if (status.index < 1 || status.index > state.last_completed()) {
    fail(ErrorKind::kInternal, "state update for unknown frame " + std::to_string(status.index));
  }
  state.frames[static_cast<std::size_t>(status.index - 1)] = status;
  write_file_atomic(layout_.state(), encode_run_state(state));
}

PipelineConfig SequenceRunner::stored_config(const RunState& state) const {
  PipelineConfig config = config_;
  config.weights = state.weights;
  config.toggles = state.toggles;
  return config;
}

ViewRig SequenceRunner::resolve_rig(const std::optional<RunState>& state) const {
  if (state) return build_rig(state->rig);
  RigParams params;
  params.elevation_deg = manifest_.rig.elevation_deg;
  params.image_size = manifest_.rig.image_size;
  params.focal = manifest_.rig.focal > 0.0 ? manifest_.rig.focal : default_focal(manifest_.rig.image_size);
  if (manifest_.rig.radius) {
    params.radius = *manifest_.rig.radius;
    return build_rig(params);
  }
  double radius = 0.0;
  for (const FrameRecord& f : manifest_.frames) {
    radius = std::max(radius, bounding_radius(recenter(load_mesh(f.mesh)).mesh));
  }
  params.radius = fit_rig_radius(radius, params.image_size, params.focal);
  return build_rig(params);
}

ViewRig SequenceRunner::rig() const { return resolve_rig(state()); }

LabelFrame SequenceRunner::final_labels(int frame) const {
  const auto st = state();
  const FrameStatus* status = st ? st->find(frame) : nullptr;
  if (!status) fail(ErrorKind::kInvalid, "frame " + std::to_string(frame) + " has not been processed");
  LabelFrame labels = load_label_frame(layout_.labels(frame, status->rectified ? 2 : 1));
  labels.frame_index = frame;
  return labels;
}

void SequenceRunner::write_round(const FrameRound& round, int frame, int round_index, const TriMesh& mesh) const {
  save_label_frame(round.labels, layout_.labels(frame, round_index));
  for (std::size_t n = 0; n < round.renders.size(); ++n) {
    write_label_png(round.renders[n], manifest_.registry, layout_.label_render(frame, static_cast<int>(n), round_index));
  }
  write_file_atomic(layout_.trace(frame, round_index), trace_csv(round.trace, round.initial_energy));
  // Garments follow the latest round; drop files of labels that vanished.
  const fs::path dir = layout_.garment_dir(frame);
  std::error_code ec;
  fs::remove_all(dir, ec);
  for (const GarmentMesh& g : extract_garments(mesh, round.labels)) {
    save_mesh(g.mesh, dir / (manifest_.registry.at(g.label).name + ".ply"), PlyEncoding::kBinaryLittleEndian);
  }
}

void SequenceRunner::clear_round2(int frame) const {
  std::error_code ec;
  fs::remove(layout_.labels(frame, 2), ec);
  fs::remove(layout_.trace(frame, 2), ec);
  for (int n = 0; n < kRigViews; ++n) fs::remove(layout_.label_render(frame, n, 2), ec);
}

FrameStatus SequenceRunner::process(const PipelineConfig& config, const ViewRig& rig, int frame, const TriMesh& mesh,
                                    const TriMesh* prev_mesh, const LabelFrame* prev_labels, int prev_round) const {
  const DiskEvidence evidence(manifest_, frame);
  const FrameResult result =
      frame == 1 ? init_first_frame(config, rig, mesh, evidence, 1)
                 : process_frame(config, rig, frame, mesh, evidence, PreviousFrame{prev_mesh, prev_labels});
  // Stale round-2 files would otherwise outlive the labels they corrected.
  clear_round2(frame);
  write_round(result.round1, frame, 1, mesh);
  FrameStatus status;
  status.index = frame;
  status.energy = result.round1.energy;
  status.moved = result.round1.moved;
  status.prev_round = frame == 1 ? 0 : prev_round;
  return status;
}

std::vector<FrameStatus> SequenceRunner::run(const RunOptions& options) {
  std::optional<RunState> previous_state = options.resume ? state() : std::nullopt;
  RunState st;
  PipelineConfig config = config_;
  if (previous_state) {
    st = *previous_state;
    config = stored_config(st);
  } else {
    st.rig = resolve_rig(std::nullopt).params;
    st.weights = config.weights;
    st.toggles = config.toggles;
    save_state(st);
  }
  const ViewRig rig = build_rig(st.rig);

  const int total = static_cast<int>(manifest_.frame_count());
  const int last = options.stop_after ? std::min(*options.stop_after, total) : total;
  std::optional<TriMesh> prev_mesh;
  std::optional<LabelFrame> prev_labels;
  int prev_round = 0;
  const int start = st.last_completed() + 1;
  if (start > 1 && start <= last) {
    const FrameStatus& p = st.frames.back();
    prev_mesh = load_mesh(manifest_.frame(p.index).mesh);
    prev_round = p.rectified ? 2 : 1;
    prev_labels = load_label_frame(layout_.labels(p.index, prev_round), prev_mesh->vertex_count());
  }

  std::vector<FrameStatus> done;
  for (int k = start; k <= last; ++k) {
    TriMesh mesh = load_mesh(manifest_.frame(k).mesh);
    FrameStatus status = process(config, rig, k, mesh, prev_mesh ? &*prev_mesh : nullptr,
                                 prev_labels ? &*prev_labels : nullptr, prev_round);
    st.frames.push_back(status);
    save_state(st);
    if (options.on_frame) options.on_frame(status);
    done.push_back(status);
    prev_labels = load_label_frame(layout_.labels(k, 1), mesh.vertex_count());
    prev_mesh = std::move(mesh);
    prev_round = 1;
  }
  return done;
}

std::vector<FrameStatus> SequenceRunner::rectify(int frame, bool propagate) {
  const auto st = state();
  const FrameStatus* status = st ? st->find(frame) : nullptr;
  if (!status) fail(ErrorKind::kInvalid, "frame " + std::to_string(frame) + " has not been processed");
  const PipelineConfig config = stored_config(*st);
  const ViewRig rig = build_rig(st->rig);

  auto rectify_one = [&](int k, const FrameStatus& base, const TriMesh& mesh, const TriMesh* prev_mesh,
                         const LabelFrame* prev_labels) {
    const DiskEvidence evidence(manifest_, k);
    std::vector<RectificationOverlay> overlays(rig.size());
    for (std::size_t n = 0; n < rig.size(); ++n) overlays[n] = evidence.manual(static_cast<int>(n));
    FrameResult round1;
    round1.frame_index = k;
    round1.round1.labels = load_label_frame(layout_.labels(k, 1), mesh.vertex_count());
    round1.round1.labels.frame_index = k;
    const PreviousFrame previous{prev_mesh, prev_labels};
    const FrameResult result =
        rectify_frame(config, rig, round1, mesh, evidence, k == 1 ? nullptr : &previous, overlays);
    FrameStatus out = base;
    if (result.round2) {
      write_round(*result.round2, k, 2, mesh);
      out.rectified = true;
      out.energy = result.round2->energy;
      out.moved = result.round2->moved;
    } else {
      clear_round2(k);
      std::error_code ec;
      fs::remove_all(layout_.garment_dir(k), ec);
      for (const GarmentMesh& g : extract_garments(mesh, round1.round1.labels)) {
        save_mesh(g.mesh, layout_.garment_dir(k) / (manifest_.registry.at(g.label).name + ".ply"),
                  PlyEncoding::kBinaryLittleEndian);
      }
      out.rectified = false;
    }
    update_status(out);
    return out;
  };

  std::vector<FrameStatus> changed;
  std::optional<TriMesh> prev_mesh;
  std::optional<LabelFrame> prev_labels;
  if (frame > 1) {
    prev_mesh = load_mesh(manifest_.frame(frame - 1).mesh);
    prev_labels = load_label_frame(layout_.labels(frame - 1, status->prev_round), prev_mesh->vertex_count());
  }
  TriMesh mesh = load_mesh(manifest_.frame(frame).mesh);
  const FrameStatus base = *status;
  changed.push_back(rectify_one(frame, base, mesh, prev_mesh ? &*prev_mesh : nullptr,
                                prev_labels ? &*prev_labels : nullptr));
  if (!propagate) return changed;

  int prev_round = changed.back().rectified ? 2 : 1;
  prev_labels = load_label_frame(layout_.labels(frame, prev_round), mesh.vertex_count());
  prev_mesh = std::move(mesh);
  for (int k = frame + 1; k <= st->last_completed(); ++k) {
    TriMesh next = load_mesh(manifest_.frame(k).mesh);
    FrameStatus s = process(config, rig, k, next, &*prev_mesh, &*prev_labels, prev_round);
    update_status(s);
    const DiskEvidence evidence(manifest_, k);
    bool has_overlay = false;
    for (std::size_t n = 0; n < rig.size() && !has_overlay; ++n) {
      has_overlay = !evidence.manual(static_cast<int>(n)).empty();
    }
    if (has_overlay) s = rectify_one(k, s, next, &*prev_mesh, &*prev_labels);
    changed.push_back(s);
    prev_round = s.rectified ? 2 : 1;
    prev_labels = load_label_frame(layout_.labels(k, prev_round), next.vertex_count());
    prev_mesh = std::move(next);
  }
  return changed;
}

std::vector<fs::path> SequenceRunner::render_rgb(const std::vector<int>& frames, const std::vector<int>& views) const {
  const ViewRig rig_ = rig();
  std::vector<fs::path> written;
  for (int k : frames) {
    const TriMesh mesh = recenter(load_mesh(manifest_.frame(k).mesh)).mesh;
    if (!mesh.has_colors()) continue;
    for (int n : views) {
      if (n < 0 || static_cast<std::size_t>(n) >= rig_.size()) {
        fail(ErrorKind::kInvalid, "view " + std::to_string(n) + " is outside the rig");
      }
      const RasterMap map = rasterize(mesh, rig_[static_cast<std::size_t>(n)]);
      const fs::path path = layout_.rgb_render(k, n);
      write_rgb_png(render_color(map, mesh), path);
      written.push_back(path);
    }
  }
  return written;
}

std::vector<fs::path> SequenceRunner::extract(int frame) const {
  const TriMesh mesh = load_mesh(manifest_.frame(frame).mesh);
  const LabelFrame labels = final_labels(frame);
  std::vector<fs::path> written;
  for (const GarmentMesh& g : extract_garments(mesh, labels)) {
    const fs::path path = layout_.garment_dir(frame) / (manifest_.registry.at(g.label).name + ".ply");
    save_mesh(g.mesh, path, PlyEncoding::kBinaryLittleEndian);
    written.push_back(path);
  }
  return written;
}

}  // namespace lf4d
