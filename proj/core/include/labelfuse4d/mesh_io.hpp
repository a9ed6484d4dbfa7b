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

#include "labelfuse4d/mesh.hpp"

namespace lf4d {

enum class PlyEncoding { kAscii, kBinaryLittleEndian };

// Loads a PLY (ASCII or binary, either endianness) or OBJ file, chosen by
// extension. Polygons are fan-triangulated. The result is validated.
TriMesh load_mesh(const std::filesystem::path& path);

// Writes PLY or OBJ depending on the extension. Vertex colors are stored as
// 8-bit channels, so they round-trip to within 1/255.
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path,
               PlyEncoding encoding = PlyEncoding::kBinaryLittleEndian);

}  // namespace lf4d
