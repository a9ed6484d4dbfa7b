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


#include "fixture.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "labelfuse4d/evidence_io.hpp"
#include "labelfuse4d/fs_util.hpp"
#include "labelfuse4d/image_io.hpp"
#include "labelfuse4d/label_frame.hpp"
#include "labelfuse4d/mesh_io.hpp"
#include "labelfuse4d/pipeline.hpp"

namespace lf4d::testing {

namespace fs = std::filesystem;

Fixture write_fixture(const fs::path& dir, const FixtureOptions& options) {
  Fixture fx;
  Rng rng(options.seed);
  TriMesh base = icosphere(options.level);
  if (options.colors) {
    for (const Vec3& v : base.vertices) {
      base.colors.push_back((0.5 * (v + Vec3::Ones())).cast<float>());
    }
  }
  const LabelFrame truth = hemisphere_labels(base, kFixtureNormal, 3, 4);
  const Eigen::Matrix3d step =
      Eigen::AngleAxisd(options.degrees_per_frame * std::numbers::pi / 180.0, Vec3::UnitY()).toRotationMatrix();
  Eigen::Matrix3d pose = Eigen::Matrix3d::Identity();
  for (int k = 0; k < options.frames; ++k) {
    fx.meshes.push_back(rotated(base, pose));
    fx.truth.push_back(LabelFrame{k + 1, truth.labels});
    pose = step * pose;
  }
  RigParams params;
  params.image_size = options.image_size;
  // Rounded so the radius written to the manifest reproduces this rig exactly.
  params.radius = std::ceil(fit_rig(fx.meshes, params).params.radius * 1000.0) / 1000.0;
  fx.rig = build_rig(params);

  const fs::path ev = dir / "evidence";
  std::string frames = "[";
  pose = Eigen::Matrix3d::Identity();
  for (int k = 1; k <= options.frames; ++k) {
    const TriMesh& mesh = fx.meshes[static_cast<std::size_t>(k - 1)];
    const std::string ks = std::to_string(k);
    save_mesh(mesh, dir / "meshes" / (ks + ".ply"));
    save_label_frame(fx.truth.back(), dir / "gt" / (ks + ".txt"), LabelFileFormat::kText);
    const auto parser = parser_evidence(fx.rig, mesh, fx.truth[static_cast<std::size_t>(k - 1)],
                                        options.parser_noise, 6, rng);
    const auto masks = hemisphere_masks(fx.rig, mesh, pose * kFixtureNormal, 0.0, 1.0, rng);
    std::vector<FlowField> flow;
    if (k > 1) flow = rotation_flow(fx.rig, fx.meshes[static_cast<std::size_t>(k - 2)], step);
    for (std::size_t n = 0; n < fx.rig.size(); ++n) {
      const std::string ns = std::to_string(n);
      write_label_png(parser[n].labels(), LabelRegistry::human_default(), ev / "par" / ks / (ns + ".png"));
      if (options.write_masks) write_masks(masks[n], ev / "masks" / ks / (ns + ".json"));
      if (options.write_flow && k > 1) write_flo(flow[n], ev / "flow" / ks / (ns + ".flo"));
    }
    frames += std::string(k > 1 ? "," : "") + R"({"index": )" + ks + R"(, "mesh": "meshes/)" + ks +
              R"(.ply", "gt_labels": "gt/)" + ks + R"(.txt"})";
    pose = step * pose;
  }
  frames += "]";
  fx.manifest_path = dir / "sequence.json";
  write_file_atomic(fx.manifest_path, R"({"rig": {"image_size": )" + std::to_string(options.image_size) +
                                          R"(, "radius": )" + std::to_string(fx.rig.params.radius) +
                                          R"(}, "frames": )" + frames + "}\n");
  fx.manifest = load_manifest(fx.manifest_path);
  return fx;
}

}  // namespace lf4d::testing
