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


// On-disk sequence fixtures: meshes, evidence files and a manifest.

#pragma once

#include <filesystem>
#include <vector>

#include "labelfuse4d/manifest.hpp"
#include "synthetic.hpp"

namespace lf4d::testing {

struct FixtureOptions {
  int frames = 3;
  int level = 3;                    // icosphere subdivision
  int image_size = 64;
  double degrees_per_frame = 9.0;   // rotation about +y
  double parser_noise = 0.0;
  bool colors = true;
  bool write_flow = true;
  bool write_masks = true;
  unsigned seed = 1;
};

struct Fixture {
  std::filesystem::path manifest_path;
  SequenceManifest manifest;
  ViewRig rig;
  std::vector<TriMesh> meshes;
  std::vector<LabelFrame> truth;    // per frame; also written as gt/{k}.txt
};

inline const Vec3 kFixtureNormal = Vec3(0.31, 1.0, 0.17).normalized();

// Hemisphere labels 3/4 split by kFixtureNormal, rotating with the mesh.
Fixture write_fixture(const std::filesystem::path& dir, const FixtureOptions& options = {});

}  // namespace lf4d::testing
