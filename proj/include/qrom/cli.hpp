// Copyright 2026 The qrom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file cli.hpp
 * @brief Experiment driver behind the `qrom` executable.
 *
 * Commands: synth, reconstruct, sweep, classify, validate, rerun. Every
 * command that takes --out writes manifest.json next to its outputs; the
 * manifest's resolved flags re-execute the run through `rerun`.
 */
#pragma once

#include <ostream>
#include <span>
#include <string>

namespace qrom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFlagError = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitFailure = 4;

/// Version stamped into manifests and JSON outputs.
inline constexpr const char* kArtifactVersion = "0.1.0";
/// Bumped whenever a CSV column is added, removed, or reordered.
inline constexpr int kCsvSchemaVersion = 1;

/// Runs one command. `args` excludes the program name. Results go to `out`,
/// diagnostics to `err`; the return value is one of the exit codes above.
[[nodiscard]] int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace qrom::cli
