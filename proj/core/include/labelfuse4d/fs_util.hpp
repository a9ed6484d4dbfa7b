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
#include <string>
#include <string_view>

namespace lf4d {

// Whole-file read; throws Error(kIo) when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary and renames it over `path`, so concurrent
// readers see either the old or the new file, never a partial one. Parent
// directories are created as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace lf4d
