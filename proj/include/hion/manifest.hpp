/*
 Copyright 2026 The Hion Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hion/errors.hpp"

namespace hion {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Record of one CLI invocation: the resolved configuration snapshot, seed
/// and artifact hashes. A run is reproducible from its manifest alone.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_snapshot;  // config-file format, re-parseable
  std::uint64_t seed = 0;
  std::string version;
  std::string outdir;
  double wall_ms = 0.0;
  std::vector<std::pair<std::string, std::string>> artifacts;  // (name, sha256)

  void add_artifact(const std::string& outdir_path, const std::string& name);
  void write(const std::string& path) const;
};

}  // namespace hion
