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

#include <iosfwd>
#include <string>
#include <vector>

#include "labelfuse4d/error.hpp"
#include "labelfuse4d/pipeline.hpp"

namespace lf4d::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;  // usage, I/O, parse and argument errors
inline constexpr int kExitManifest = 2;
inline constexpr int kExitEvidence = 3;
inline constexpr int kExitShape = 4;
inline constexpr int kExitInternal = 5;

int exit_code(ErrorKind kind);

// "lambda_p=0.5,lambda_b=2" (keys lambda_p, lambda_o, lambda_s, lambda_po,
// lambda_b, w_man) applied over `weights`. Throws kInvalid.
void apply_weight_overrides(const std::vector<std::string>& items, FusionWeights& weights);

// "par,opt,sam" subsets. Throws kInvalid.
SourceToggles parse_toggles(const std::string& text);

// "0-11", "1,3,5-7". Throws kInvalid.
std::vector<int> parse_range(const std::string& text);

// Entry point of the labelfuse4d executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lf4d::cli
