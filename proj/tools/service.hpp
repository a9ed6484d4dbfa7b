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
#include <memory>
#include <mutex>
#include <set>
#include <string>

#include "labelfuse4d/sequence.hpp"

namespace httplib {
class Server;
}

namespace lf4d {

inline constexpr int kDefaultPort = 7464;

// Port from LF4D_PORT when set and valid, else kDefaultPort.
int default_service_port();

// REST front end of a run directory for the rectification UI:
//
//   GET  /frames
//   GET  /frames/{k}/views/{n}/rgb.png
//   GET  /frames/{k}/views/{n}/labels.png       latest round
//   GET  /frames/{k}/views/{n}/masks.json
//   POST /frames/{k}/views/{n}/corrections      [[x, y, label], ...]
//   POST /frames/{k}/rectify[?propagate=1]
//   GET  /registry
//
// Rectification runs synchronously in the request; a second request for a
// frame that is still being rectified gets 409.
class RectifyService {
 public:
  explicit RectifyService(SequenceRunner& runner, std::filesystem::path ui_dir = {});
  ~RectifyService();

  RectifyService(const RectifyService&) = delete;
  RectifyService& operator=(const RectifyService&) = delete;

  httplib::Server& server() { return *server_; }

  // Binds host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  void mount();
  bool try_acquire(int frame);
  void release(int frame);

  SequenceRunner& runner_;
  std::filesystem::path ui_dir_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex busy_mutex_;
  std::set<int> busy_;
};

}  // namespace lf4d
