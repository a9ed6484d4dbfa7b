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


#include "cli.hpp"

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "labelfuse4d/fs_util.hpp"
#include "labelfuse4d/image_io.hpp"
#include "labelfuse4d/metrics.hpp"
#include "labelfuse4d/mesh_io.hpp"
#include "labelfuse4d/sequence.hpp"
#include "service.hpp"

namespace lf4d::cli {
namespace fs = std::filesystem;
using json = nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kManifest:
      return kExitManifest;
    case ErrorKind::kEvidence:
      return kExitEvidence;
    case ErrorKind::kShape:
      return kExitShape;
    case ErrorKind::kInternal:
      return kExitInternal;
    default:
      return kExitError;
  }
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::kInvalid, "bad number '" + text + "' for " + what);
}

}  // namespace

void apply_weight_overrides(const std::vector<std::string>& items, FusionWeights& w) {
  for (const std::string& group : items) {
    for (const std::string& item : split(group, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) fail(ErrorKind::kInvalid, "weight override '" + item + "' is not key=value");
      const std::string key = item.substr(0, eq);
      const double value = parse_number(item.substr(eq + 1), key);
      if (key == "lambda_p") w.parser = value;
      else if (key == "lambda_o") w.flow = value;
      else if (key == "lambda_s") w.mask = value;
      else if (key == "lambda_po") w.parser_flow = value;
      else if (key == "lambda_b") w.smoothness = value;
      else if (key == "w_man") w.manual = value;
      else fail(ErrorKind::kInvalid, "unknown weight '" + key + "' (lambda_p, lambda_o, lambda_s, lambda_po, lambda_b, w_man)");
    }
  }
  w.validate();
}

SourceToggles parse_toggles(const std::string& text) {
  SourceToggles t{false, false, false};
  for (const std::string& item : split(text, ',')) {
    if (item == "par") t.parser = true;
    else if (item == "opt") t.flow = true;
    else if (item == "sam") t.mask = true;
    else fail(ErrorKind::kInvalid, "unknown source '" + item + "' (par, opt, sam)");
  }
  return t;
}

std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : split(text, ',')) {
    const auto dash = item.find('-', 1);
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoi(item));
      } else {
        const int a = std::stoi(item.substr(0, dash));
        const int b = std::stoi(item.substr(dash + 1));
        if (b < a) fail(ErrorKind::kInvalid, "empty range '" + item + "'");
        for (int i = a; i <= b; ++i) out.push_back(i);
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(ErrorKind::kInvalid, "bad range '" + item + "'");
    }
  }
  if (out.empty()) fail(ErrorKind::kInvalid, "empty range '" + text + "'");
  return out;
}

namespace {

struct Common {
  std::string manifest;
  std::string out_root;
};

SequenceManifest open_manifest(const Common& c) {
  if (c.manifest.empty()) fail(ErrorKind::kManifest, "--manifest is required");
  SequenceManifest m = load_manifest(c.manifest);
  if (!c.out_root.empty()) m.output_root = c.out_root;
  return m;
}

std::vector<LabelId> read_labels(const fs::path& path, const LabelRegistry& registry, int* width, int* height) {
  if (path.extension() == ".png") {
    const LabelImage image = to_label_image(read_index_png(path), registry, path.string());
    *width = image.width;
    *height = image.height;
    return image.labels;
  }
  *width = *height = -1;
  return load_label_frame(path).labels;
}

PointCloud read_points(const fs::path& path, std::size_t samples, std::uint64_t seed) {
  const std::string ext = path.extension().string();
  if (ext == ".xyz" || ext == ".txt") {
    std::istringstream in(read_file(path));
    PointCloud cloud;
    double x, y, z;
    while (in >> x >> y >> z) cloud.emplace_back(x, y, z);
    if (!in.eof()) fail(ErrorKind::kParse, path.string() + ": expected whitespace-separated x y z triples");
    if (cloud.empty()) fail(ErrorKind::kParse, path.string() + ": no points");
    return cloud;
  }
  const TriMesh mesh = load_mesh(path);
  return samples == 0 ? mesh.vertices : sample_surface(mesh, samples, seed);
}

json report_json(const ParsingReport& r, const LabelRegistry& registry) {
  json per = json::array();
  for (const LabelScore& s : r.per_label) {
    per.push_back({{"label", s.label},
                   {"name", registry.contains(s.label) ? registry.at(s.label).name : std::to_string(s.label)},
                   {"accuracy", s.accuracy},
                   {"iou", s.iou},
                   {"gt_count", s.gt_count}});
  }
  return {{"per_label", per},
          {"mAcc", r.mean_accuracy},
          {"mIoU", r.mean_iou},
          {"pixelAcc", r.pixel_accuracy},
          {"evaluated", r.evaluated}};
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_file_atomic(out_path, text);
  }
}

std::string rig_summary(const ViewRig& rig) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4);
  s << "rig: " << rig.size() << " views (" << kHorizontalViews << " horizontal, " << kRingViews << " upper, "
    << kRingViews << " lower), radius " << rig.params.radius << " m, elevation +/-" << rig.params.elevation_deg
    << " deg, focal " << rig.params.focal << " px, " << rig.params.image_size << "x" << rig.params.image_size << "\n";
  return s.str();
}

RectifyService* g_service = nullptr;

extern "C" void handle_stop_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"labelfuse4d: per-vertex human parsing of 4D scan sequences"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "labelfuse4d 0.1.0");

  Common common;
  auto add_common = [&common](CLI::App* cmd, bool manifest_required) {
    auto* opt = cmd->add_option("--manifest,-m", common.manifest, "sequence manifest (JSON)");
    if (manifest_required) opt->required();
    cmd->add_option("--out", common.out_root, "output root (overrides the manifest)");
  };

  // render
  auto* render = app.add_subcommand("render", "render per-view RGB images of the sequence meshes");
  add_common(render, true);
  std::string frames_text, views_text = "0-23";
  render->add_option("--frames", frames_text, "frames, e.g. 1-5 (default: all)");
  render->add_option("--views", views_text, "views, e.g. 0-11");

  // run
  auto* run_cmd = app.add_subcommand("run", "label every frame of the sequence");
  add_common(run_cmd, true);
  std::vector<std::string> weight_items;
  std::string toggle_text = "par,opt,sam";
  bool resume = false;
  int stop_after = 0;
  std::uint64_t seed = kDefaultSampleSeed;
  run_cmd->add_option("--weights", weight_items, "weight overrides key=value[,key=value]");
  run_cmd->add_option("--toggle", toggle_text, "enabled sources: par,opt,sam");
  run_cmd->add_flag("--resume", resume, "continue from state.json");
  run_cmd->add_option("--stop-after", stop_after, "stop after this frame");
  run_cmd->add_option("--seed", seed, "random seed (the pipeline itself is deterministic)");

  // rectify
  auto* rectify = app.add_subcommand("rectify", "second optimization round from manual/ overlays");
  add_common(rectify, true);
  int rectify_frame_index = 0;
  bool propagate = false;
  rectify->add_option("--frame,-k", rectify_frame_index, "frame to rectify")->required();
  rectify->add_flag("--propagate", propagate, "reprocess the following frames");

  // eval
  auto* eval = app.add_subcommand("eval", "parsing, Chamfer and simulation metrics");
  add_common(eval, false);
  std::string kind = "labels", pred, gt, tmpl, eval_out;
  std::size_t samples = 100000;
  double scale = 100.0, w = 1.0;
  eval->add_option("--kind", kind, "labels | chamfer | sim")->check(CLI::IsMember({"labels", "chamfer", "sim"}));
  eval->add_option("--pred", pred, "prediction (.l4dl/.png labels, mesh, or .xyz points)");
  eval->add_option("--gt", gt, "ground truth of the same kind");
  eval->add_option("--template", tmpl, "rest-shape template mesh (sim)");
  eval->add_option("--samples", samples, "surface samples per mesh for chamfer (0: vertices)");
  eval->add_option("--scale", scale, "coordinate scale before measuring (100: meters to cm)");
  eval->add_option("--w", w, "stretching weight (sim)");
  eval->add_option("--seed", seed, "sampling seed");
  eval->add_option("--report", eval_out, "write the report here instead of stdout");

  // extract
  auto* extract = app.add_subcommand("extract", "write per-label garment meshes");
  add_common(extract, true);
  std::string extract_frames;
  extract->add_option("--frames", extract_frames, "frames (default: all processed)");

  // serve
  auto* serve = app.add_subcommand("serve", "REST service for the rectification UI");
  add_common(serve, true);
  int port = default_service_port();
  std::string host = "127.0.0.1", ui_dir;
  serve->add_option("--port", port, "port (default 7464 or LF4D_PORT)")->check(CLI::Range(1024, 65535));
  serve->add_option("--host", host, "bind address");
  serve->add_option("--ui", ui_dir, "static UI bundle served under /ui");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (render->parsed()) {
      const SequenceManifest m = open_manifest(common);
      SequenceRunner runner(m, PipelineConfig{});
      const ViewRig rig = runner.rig();
      out << rig_summary(rig);
      std::vector<int> frames;
      if (frames_text.empty()) {
        for (const FrameRecord& f : m.frames) frames.push_back(f.index);
      } else {
        frames = parse_range(frames_text);
      }
      const auto written = runner.render_rgb(frames, parse_range(views_text));
      out << "wrote " << written.size() << " images\n";
      if (written.empty()) out << "note: meshes carry no vertex colors; nothing rendered\n";
      return kExitOk;
    }
    if (run_cmd->parsed()) {
      PipelineConfig config;
      apply_weight_overrides(weight_items, config.weights);
      config.toggles = parse_toggles(toggle_text);
      SequenceRunner runner(open_manifest(common), config);
      RunOptions options;
      options.resume = resume;
      if (stop_after > 0) options.stop_after = stop_after;
      out << std::setw(6) << "frame" << std::setw(16) << "energy" << std::setw(8) << "moved" << "\n";
      options.on_frame = [&out](const FrameStatus& s) {
        out << std::setw(6) << s.index << std::setw(16) << std::fixed << std::setprecision(6) << s.energy
            << std::setw(8) << s.moved << "\n"
            << std::flush;
      };
      const auto done = runner.run(options);
      out << "processed " << done.size() << " frame(s) into " << runner.layout().root.string() << "\n";
      return kExitOk;
    }
    if (rectify->parsed()) {
      SequenceRunner runner(open_manifest(common), PipelineConfig{});
      for (const FrameStatus& s : runner.rectify(rectify_frame_index, propagate)) {
        out << "frame " << s.index << ": " << (s.rectified ? "round 2" : "round 1 (no corrections)")
            << ", energy " << s.energy << ", moved " << s.moved << "\n";
      }
      return kExitOk;
    }
    if (eval->parsed()) {
      if (!common.manifest.empty()) {
        // Batch: every processed frame that lists ground truth.
        if (kind != "labels") fail(ErrorKind::kInvalid, "batch evaluation supports --kind labels only");
        const SequenceManifest m = open_manifest(common);
        SequenceRunner runner(m, PipelineConfig{});
        std::ostringstream csv;
        csv.precision(10);
        csv << "frame,mAcc,mIoU,pixelAcc\n";
        for (const FrameRecord& f : m.frames) {
          if (!f.gt_labels) continue;
          const LabelFrame predicted = runner.final_labels(f.index);
          const LabelFrame truth = load_label_frame(*f.gt_labels, predicted.size());
          const ParsingReport r = parsing_metrics(predicted, truth);
          csv << f.index << ',' << r.mean_accuracy << ',' << r.mean_iou << ',' << r.pixel_accuracy << '\n';
        }
        emit(csv.str(), eval_out, out);
        return kExitOk;
      }
      if (pred.empty() || gt.empty()) fail(ErrorKind::kInvalid, "eval needs --pred and --gt (or --manifest)");
      json report;
      if (kind == "labels") {
        const LabelRegistry registry = LabelRegistry::human_default();
        int pw, ph, gw, gh;
        const auto p = read_labels(pred, registry, &pw, &ph);
        const auto g = read_labels(gt, registry, &gw, &gh);
        if (pw != gw || ph != gh) fail(ErrorKind::kShape, "eval: prediction and ground truth differ in shape");
        report = report_json(parsing_metrics(p, g), registry);
      } else if (kind == "chamfer") {
        PointCloud x = read_points(pred, samples, seed);
        PointCloud y = read_points(gt, samples, seed + 1);
        for (Vec3& v : x) v *= scale;
        for (Vec3& v : y) v *= scale;
        report = {{"d_CD", chamfer_squared(x, y)}, {"points", {x.size(), y.size()}}, {"seed", seed}, {"scale", scale}};
      } else {
        if (tmpl.empty()) fail(ErrorKind::kInvalid, "eval --kind sim needs --template");
        const TriMesh sim = scaled(load_mesh(pred), scale);
        const TriMesh truth = scaled(load_mesh(gt), scale);
        const TriMesh rest = scaled(load_mesh(tmpl), scale);
        const double l_cd = chamfer_squared(sim.vertices, truth.vertices);
        const double e_str = stretching_energy(edge_lengths(sim, rest));
        report = {{"L_CD", l_cd}, {"E_str", e_str}, {"w", w}, {"L", simulation_loss(sim, truth, rest, w)}, {"scale", scale}};
      }
      emit(report.dump(2) + "\n", eval_out, out);
      return kExitOk;
    }
    if (extract->parsed()) {
      const SequenceManifest m = open_manifest(common);
      SequenceRunner runner(m, PipelineConfig{});
      std::vector<int> frames;
      if (extract_frames.empty()) {
        const auto st = runner.state();
        for (int k = 1; st && k <= st->last_completed(); ++k) frames.push_back(k);
      } else {
        frames = parse_range(extract_frames);
      }
      std::size_t count = 0;
      for (int k : frames) count += runner.extract(k).size();
      out << "wrote " << count << " garment mesh(es) for " << frames.size() << " frame(s)\n";
      return kExitOk;
    }
    if (serve->parsed()) {
      SequenceRunner runner(open_manifest(common), PipelineConfig{});
      RectifyService service(runner, ui_dir);
      const int bound = service.bind(host, port);
      out << "serving " << runner.layout().root.string() << " on http://" << host << ":" << bound << "\n"
          << std::flush;
      g_service = &service;
      std::signal(SIGINT, handle_stop_signal);
      std::signal(SIGTERM, handle_stop_signal);
      service.listen();
      g_service = nullptr;
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitError;
}

}  // namespace lf4d::cli
