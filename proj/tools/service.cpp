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


#include "service.hpp"

#include <cstdlib>
#include <string>

#include <httplib.h>
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

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, {{"error", message}}, status);
}

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalid:
    case ErrorKind::kParse:
      return 400;
    case ErrorKind::kEvidence:
    case ErrorKind::kShape:
      return 422;
    default:
      return 500;
  }
}

}  // namespace

int default_service_port() {
  if (const char* env = std::getenv("LF4D_PORT")) {
    try {
      const int port = std::stoi(env);
      if (port >= 1024 && port <= 65535) return port;
    } catch (const std::exception&) {
    }
  }
  return kDefaultPort;
}

RectifyService::RectifyService(SequenceRunner& runner, fs::path ui_dir)
    : runner_(runner), ui_dir_(std::move(ui_dir)), server_(std::make_unique<httplib::Server>()) {
  mount();
}

RectifyService::~RectifyService() { stop(); }

int RectifyService::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  if (!server_->bind_to_port(host, port)) fail(ErrorKind::kIo, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void RectifyService::listen() { server_->listen_after_bind(); }

void RectifyService::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

bool RectifyService::try_acquire(int frame) {
  std::lock_guard lock(busy_mutex_);
  return busy_.insert(frame).second;
}

void RectifyService::release(int frame) {
  std::lock_guard lock(busy_mutex_);
  busy_.erase(frame);
}

void RectifyService::mount() {
  auto& srv = *server_;
  const SequenceManifest& manifest = runner_.manifest();
  const OutputLayout& layout = runner_.layout();

  // Resolves {k}/{n} path parameters; answers 404 and returns false when
  // either is unknown.
  auto frame_view = [&manifest](const httplib::Request& req, httplib::Response& res, int& k, int& n,
                                      bool with_view) {
    try {
      k = std::stoi(req.matches[1]);
      if (with_view) n = std::stoi(req.matches[2]);
    } catch (const std::exception&) {
      send_error(res, 404, "bad frame or view");
      return false;
    }
    if (!manifest.has_frame(k)) {
      send_error(res, 404, "unknown frame " + std::to_string(k));
      return false;
    }
    if (with_view && (n < 0 || n >= kRigViews)) {
      send_error(res, 404, "unknown view " + std::to_string(n));
      return false;
    }
    return true;
  };

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, http_status(e.kind()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  });

  srv.Get("/registry", [&manifest](const httplib::Request&, httplib::Response& res) {
    json labels = json::array();
    for (const LabelInfo& info : manifest.registry.labels()) {
      labels.push_back({{"id", info.id}, {"name", info.name}, {"color", {info.color[0], info.color[1], info.color[2]}}});
    }
    const auto& bg = LabelRegistry::kBackgroundColor;
    send_json(res, {{"labels", labels},
                    {"background", {{"id", kBackground}, {"index", kBackgroundIndex}, {"color", {bg[0], bg[1], bg[2]}}}}});
  });

  srv.Get("/frames", [this, &manifest](const httplib::Request&, httplib::Response& res) {
    const auto state = runner_.state();
    json frames = json::array();
    for (const FrameRecord& f : manifest.frames) {
      const FrameStatus* s = state ? state->find(f.index) : nullptr;
      json entry = {{"index", f.index}, {"views", kRigViews}, {"status", s ? "done" : "pending"}};
      if (s) {
        entry["rectified"] = s->rectified;
        entry["energy"] = s->energy;
        entry["moved"] = s->moved;
      }
      {
        std::lock_guard lock(busy_mutex_);
        if (busy_.count(f.index)) entry["status"] = "rectifying";
      }
      frames.push_back(entry);
    }
    send_json(res, frames);
  });

  srv.Get(R"(/frames/(\d+)/views/(\d+)/rgb\.png)", [this, frame_view, &layout, &manifest](
                                                        const httplib::Request& req, httplib::Response& res) {
    int k = 0, n = 0;
    if (!frame_view(req, res, k, n, true)) return;
    const fs::path path = layout.rgb_render(k, n);
    if (fs::exists(path)) {
      res.set_content(read_file(path), "image/png");
      return;
    }
    const TriMesh mesh = recenter(load_mesh(manifest.frame(k).mesh)).mesh;
    if (!mesh.has_colors()) {
      send_error(res, 404, "frame " + std::to_string(k) + " has no vertex colors");
      return;
    }
    const ViewRig rig = runner_.rig();
    res.set_content(encode_rgb_png(render_color(rasterize(mesh, rig[static_cast<std::size_t>(n)]), mesh)),
                    "image/png");
  });

  srv.Get(R"(/frames/(\d+)/views/(\d+)/labels\.png)", [frame_view, &layout](const httplib::Request& req,
                                                                             httplib::Response& res) {
    int k = 0, n = 0;
    if (!frame_view(req, res, k, n, true)) return;
    for (int round : {2, 1}) {
      const fs::path path = layout.label_render(k, n, round);
      if (fs::exists(path)) {
        res.set_header("X-Round", std::to_string(round));
        res.set_content(read_file(path), "image/png");
        return;
      }
    }
    send_error(res, 404, "frame " + std::to_string(k) + " has no label renders yet");
  });

  srv.Get(R"(/frames/(\d+)/views/(\d+)/masks\.json)", [frame_view, &manifest](const httplib::Request& req,
                                                                               httplib::Response& res) {
    int k = 0, n = 0;
    if (!frame_view(req, res, k, n, true)) return;
    const fs::path path = manifest.masks_path(k, n);
    if (!fs::exists(path)) {
      res.set_content("[]", "application/json");
      return;
    }
    // Normalized through the codec so the UI always sees {"size", "counts"}.
    res.set_content(encode_masks_json(read_masks(path)), "application/json");
  });

  srv.Post(R"(/frames/(\d+)/views/(\d+)/corrections)", [this, frame_view, &manifest](const httplib::Request& req,
                                                                                      httplib::Response& res) {
    int k = 0, n = 0;
    if (!frame_view(req, res, k, n, true)) return;
    RectificationOverlay overlay;
    try {
      overlay = decode_overlay_json(req.body, "request body");
    } catch (const Error& e) {
      send_error(res, 400, e.what());
      return;
    }
    const int size = manifest.rig.image_size;
    for (const Correction& c : overlay.corrections) {
      if (c.x < 0 || c.y < 0 || c.x >= size || c.y >= size) {
        send_error(res, 400, "correction (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                                 ") is outside the " + std::to_string(size) + "x" + std::to_string(size) + " view");
        return;
      }
      if (c.label != kBackground && !manifest.registry.contains(c.label)) {
        send_error(res, 400, "label " + std::to_string(c.label) + " is not registered");
        return;
      }
    }
    {
      std::lock_guard lock(busy_mutex_);
      if (busy_.count(k)) {
        send_error(res, 409, "frame " + std::to_string(k) + " is being rectified");
        return;
      }
    }
    write_overlay(overlay, manifest.manual_path(k, n));
    send_json(res, {{"frame", k}, {"view", n}, {"count", overlay.corrections.size()}});
  });

  srv.Post(R"(/frames/(\d+)/rectify)", [this, frame_view](const httplib::Request& req, httplib::Response& res) {
    int k = 0, n = 0;
    if (!frame_view(req, res, k, n, false)) return;
    const auto state = runner_.state();
    if (!state || !state->find(k)) {
      send_error(res, 409, "frame " + std::to_string(k) + " has not been processed yet");
      return;
    }
    if (!try_acquire(k)) {
      send_error(res, 409, "frame " + std::to_string(k) + " is already being rectified");
      return;
    }
    struct Release {
      RectifyService* self;
      int frame;
      ~Release() { self->release(frame); }
    } guard{this, k};
    const bool propagate = req.has_param("propagate") && req.get_param_value("propagate") != "0";
    const std::vector<FrameStatus> changed = runner_.rectify(k, propagate);
    json frames = json::array();
    for (const FrameStatus& s : changed) {
      json renders = json::array();
      for (int v = 0; v < kRigViews; ++v) {
        renders.push_back("/frames/" + std::to_string(s.index) + "/views/" + std::to_string(v) + "/labels.png");
      }
      frames.push_back({{"index", s.index},
                        {"rectified", s.rectified},
                        {"energy", s.energy},
                        {"moved", s.moved},
                        {"renders", renders}});
    }
    send_json(res, {{"frame", k}, {"rectified", changed.front().rectified}, {"frames", frames}});
  });

  if (!ui_dir_.empty()) srv.set_mount_point("/ui", ui_dir_.string());
}

}  // namespace lf4d
