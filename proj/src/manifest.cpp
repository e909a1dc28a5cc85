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

#include "hion/manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hion {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr)) {
    throw IoError("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file for hashing: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

void RunManifest::add_artifact(const std::string& outdir_path, const std::string& name) {
  artifacts.emplace_back(name, sha256_file(outdir_path + "/" + name));
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j;
  j["command"] = command;
  j["config_path"] = config_path;
  j["config_snapshot"] = config_snapshot;
  j["seed"] = seed;
  j["version"] = version;
  j["outdir"] = outdir;
  j["wall_ms"] = wall_ms;
  nlohmann::json arts = nlohmann::json::array();
  for (const auto& [name, hash] : artifacts) {
    arts.push_back({{"name", name}, {"sha256", hash}});
  }
  j["artifacts"] = std::move(arts);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace hion
