// Copyright 2026 The gpmmm Authors
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

// Run manifests: everything needed to repeat a CLI run and check that it
// reproduced the same bytes.

#ifndef GPMMM_IO_MANIFEST_HPP_
#define GPMMM_IO_MANIFEST_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "gpmmm/io/json.hpp"

namespace gpmmm::io {

std::string Sha256Hex(const std::string& bytes);
// Throws SchemaError if the file cannot be read.
std::string Sha256File(const std::string& path);

struct FileDigest {
  std::string path;  // as given on the command line or relative to the output directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

FileDigest DigestFile(const std::string& path, const std::string& recorded_path);

struct StageStatus {
  std::string name;
  std::string status;  // ok, failed or skipped
  double millis = 0.0;
  std::string detail;
};

struct RunManifest {
  std::string tool_version;
  std::string command;
  Json arguments = Json::object();  // command-line options other than the config
  Json config = Json::object();     // fully resolved
  std::uint64_t master_seed = 0;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;  // relative to the output directory
  std::string started_utc;
  double elapsed_ms = 0.0;
  std::vector<StageStatus> stages;
  int exit_status = 0;

  // Digest over the output digests in order; equal for byte-identical runs.
  std::string ResultDigest() const;
};

Json ToJson(const RunManifest& m);
RunManifest ManifestFromJson(const Json& j, const std::string& source = "<manifest>");

}  // namespace gpmmm::io

#endif  // GPMMM_IO_MANIFEST_HPP_
