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


#include <thread>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fixture.hpp"
#include "labelfuse4d/evidence_io.hpp"
#include "labelfuse4d/fs_util.hpp"
#include "labelfuse4d/image_io.hpp"
#include "service.hpp"
#include "test_util.hpp"

// Last: <resolv.h>, pulled in by httplib, defines a `res` macro that breaks Eigen.
#include <httplib.h>

namespace lf4d {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using testing::TempDir;

// A fixture sequence with frames 1-2 processed and frame 3 pending.
class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    fx_ = testing::write_fixture(dir_.path(), {.frames = 3});
    runner_ = std::make_unique<SequenceRunner>(fx_.manifest, PipelineConfig{});
    runner_->run({.stop_after = 2});
    service_ = std::make_unique<RectifyService>(*runner_);
    const int port = service_->bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    thread_ = std::thread([this] { service_->listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port);
    client_->set_read_timeout(120, 0);
    for (int i = 0; i < 200 && !service_->server().is_running(); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  void TearDown() override {
    service_->stop();
    if (thread_.joinable()) thread_.join();
  }

  httplib::Result post(const std::string& path, const std::string& body) {
    return client_->Post(path, body, "application/json");
  }

  TempDir dir_;
  testing::Fixture fx_;
  std::unique_ptr<SequenceRunner> runner_;
  std::unique_ptr<RectifyService> service_;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServiceTest, ListsFramesAndRegistry) {
  auto res = client_->Get("/frames");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const json frames = json::parse(res->body);
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames[0]["status"], "done");
  EXPECT_EQ(frames[0]["views"], 24);
  EXPECT_EQ(frames[0]["rectified"], false);
  EXPECT_EQ(frames[2]["status"], "pending");
  EXPECT_FALSE(frames[2].contains("energy"));

  res = client_->Get("/registry");
  ASSERT_TRUE(res);
  const json reg = json::parse(res->body);
  ASSERT_EQ(reg["labels"].size(), 6u);
  EXPECT_EQ(reg["labels"][3]["name"], "upper");
  EXPECT_EQ(reg["background"]["id"], -1);
  EXPECT_EQ(reg["background"]["index"], 255);
}

TEST_F(ServiceTest, ServesImagesAndMasks) {
  auto res = client_->Get("/frames/1/views/0/labels.png");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(res->get_header_value("X-Round"), "1");
  EXPECT_EQ(res->body, read_file(runner_->layout().label_render(1, 0)));

  res = client_->Get("/frames/2/views/23/rgb.png");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");
  write_file_atomic(dir_ / "view.png", res->body);
  const RgbImage rgb = read_rgb_png(dir_ / "view.png");
  EXPECT_EQ(rgb.width, 64);
  EXPECT_EQ(rgb.height, 64);
}

TEST_F(ServiceTest, MasksAreNormalizedAndMissingIsEmpty) {
  auto res = client_->Get("/frames/1/views/3/masks.json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(decode_masks_json(res->body), read_masks(fx_.manifest.masks_path(1, 3)));
  fs::remove(fx_.manifest.masks_path(1, 3));
  res = client_->Get("/frames/1/views/3/masks.json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "[]");
}

TEST_F(ServiceTest, UnknownFramesAndViewsAre404) {
  for (const char* path : {"/frames/9/views/0/labels.png", "/frames/1/views/24/labels.png",
                           "/frames/0/views/0/rgb.png", "/frames/3/views/0/labels.png", "/nowhere"}) {
    auto res = client_->Get(path);
    ASSERT_TRUE(res) << path;
    EXPECT_EQ(res->status, 404) << path;
  }
  auto res = post("/frames/9/rectify", "");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
}

TEST_F(ServiceTest, BadCorrectionsAre400) {
  for (const char* body : {"not json", "{\"x\": 1}", "[[1, 2]]", "[[64, 0, 3]]", "[[0, -1, 3]]", "[[1, 1, 6]]"}) {
    auto res = post("/frames/1/views/0/corrections", body);
    ASSERT_TRUE(res) << body;
    EXPECT_EQ(res->status, 400) << body;
    EXPECT_TRUE(json::parse(res->body).contains("error")) << body;
  }
  EXPECT_FALSE(fs::exists(fx_.manifest.manual_path(1, 0)));
}

TEST_F(ServiceTest, CorrectionsRoundTripAndRectify) {
  auto res = post("/frames/2/views/0/corrections", "[[10,12,5],[11,12,-1]]");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["count"], 2);
  EXPECT_EQ(read_overlay(fx_.manifest.manual_path(2, 0)),
            (RectificationOverlay{{{10, 12, 5}, {11, 12, kBackground}}}));

  // Paint the label-3 region of six views so the labels visibly change.
  for (int n = 0; n < 6; ++n) {
    const LabelImage shown =
        to_label_image(read_index_png(fx_.manifest.parser_path(2, n)), fx_.manifest.registry);
    json region = json::array();
    for (int y = 0; y < shown.height; ++y)
      for (int x = 0; x < shown.width; ++x)
        if (shown.at(x, y) == 3) region.push_back({x, y, 5});
    res = post("/frames/2/views/" + std::to_string(n) + "/corrections", region.dump());
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200);
  }

  const std::string before = client_->Get("/frames/2/views/0/labels.png")->body;
  res = post("/frames/2/rectify", "");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  const json body = json::parse(res->body);
  EXPECT_EQ(body["rectified"], true);
  ASSERT_EQ(body["frames"].size(), 1u);
  EXPECT_EQ(body["frames"][0]["renders"].size(), 24u);

  auto after = client_->Get("/frames/2/views/0/labels.png");
  ASSERT_TRUE(after);
  EXPECT_EQ(after->get_header_value("X-Round"), "2");
  EXPECT_NE(after->body, before);
  EXPECT_EQ(json::parse(client_->Get("/frames")->body)[1]["rectified"], true);
}

TEST_F(ServiceTest, RectifyPropagates) {
  runner_->run({.resume = true});
  ASSERT_EQ(post("/frames/1/views/0/corrections", "[[32,32,5]]")->status, 200);
  auto res = post("/frames/1/rectify?propagate=1", "");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(json::parse(res->body)["frames"].size(), 3u);
}

TEST_F(ServiceTest, UnprocessedFrameIs409) {
  auto res = post("/frames/3/rectify", "");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 409);
}

TEST_F(ServiceTest, EmptyOverlayRectifyKeepsRoundOne) {
  auto res = post("/frames/1/rectify", "");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["rectified"], false);
  EXPECT_EQ(client_->Get("/frames/1/views/0/labels.png")->get_header_value("X-Round"), "1");
}

TEST(ServicePort, EnvironmentOverride) {
  ::setenv("LF4D_PORT", "8123", 1);
  EXPECT_EQ(default_service_port(), 8123);
  ::setenv("LF4D_PORT", "80", 1);
  EXPECT_EQ(default_service_port(), kDefaultPort);
  ::setenv("LF4D_PORT", "abc", 1);
  EXPECT_EQ(default_service_port(), kDefaultPort);
  ::unsetenv("LF4D_PORT");
  EXPECT_EQ(default_service_port(), 7464);
}

}  // namespace
}  // namespace lf4d
