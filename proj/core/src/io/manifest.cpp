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

#include "gpmmm/io/manifest.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "gpmmm/error.hpp"

namespace gpmmm::io {
namespace {

constexpr const char* kManifestDocument = "gpmmm.manifest";

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
  }
  void Update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("SHA-256 update failed");
  }
  std::string Hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw Error("SHA-256 final failed");
    static const char* kHex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::vector<FileDigest> DigestsFromJson(ObjectReader& r, const std::string& key) {
  std::vector<FileDigest> out;
  const Json& arr = r.Raw(key);
  if (!arr.is_array()) throw SchemaError(r.PathOf(key) + ": expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    ObjectReader f(arr[i], r.PathOf(key) + "[" + std::to_string(i) + "]");
    FileDigest d;
    d.path = f.String("path", "");
    d.sha256 = f.String("sha256", "");
    d.bytes = f.Seed("bytes", 0);
    f.Finish();
    out.push_back(d);
  }
  return out;
}

Json DigestsToJson(const std::vector<FileDigest>& v) {
  Json out = Json::array();
  for (const FileDigest& d : v) out.push_back(Json{{"path", d.path}, {"sha256", d.sha256}, {"bytes", d.bytes}});
  return out;
}

}  // namespace

std::string Sha256Hex(const std::string& bytes) {
  Sha256 h;
  h.Update(bytes.data(), bytes.size());
  return h.Hex();
}

std::string Sha256File(const std::string& path) { return DigestFile(path, path).sha256; }

FileDigest DigestFile(const std::string& path, const std::string& recorded_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read " + path);
  Sha256 h;
  FileDigest d;
  d.path = recorded_path;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const auto n = static_cast<std::size_t>(in.gcount());
    h.Update(buf, n);
    d.bytes += n;
  }
  d.sha256 = h.Hex();
  return d;
}

std::string RunManifest::ResultDigest() const {
  std::string all;
  for (const FileDigest& d : outputs) all += d.path + '\0' + d.sha256 + '\n';
  return Sha256Hex(all);
}

Json ToJson(const RunManifest& m) {
  Json stages = Json::array();
  for (const StageStatus& s : m.stages)
    stages.push_back(Json{{"name", s.name}, {"status", s.status}, {"millis", s.millis}, {"detail", s.detail}});
  return Json{{"schema_version", kSchemaVersion},
              {"document", kManifestDocument},
              {"tool_version", m.tool_version},
              {"command", m.command},
              {"arguments", m.arguments},
              {"config", m.config},
              {"master_seed", m.master_seed},
              {"inputs", DigestsToJson(m.inputs)},
              {"outputs", DigestsToJson(m.outputs)},
              {"result_digest", m.ResultDigest()},
              {"started_utc", m.started_utc},
              {"elapsed_ms", m.elapsed_ms},
              {"stages", stages},
              {"exit_status", m.exit_status}};
}

RunManifest ManifestFromJson(const Json& j, const std::string& source) {
  ObjectReader r(j, source);
  CheckSchemaVersion(r);
  if (r.String("document", "") != kManifestDocument)
    throw SchemaError(r.PathOf("document") + ": not a run manifest");
  RunManifest m;
  m.tool_version = r.String("tool_version", "");
  m.command = r.String("command", "");
  m.arguments = r.Raw("arguments");
  m.config = r.Raw("config");
  if (!m.arguments.is_object()) throw SchemaError(r.PathOf("arguments") + ": expected an object");
  if (!m.config.is_object()) throw SchemaError(r.PathOf("config") + ": expected an object");
  m.master_seed = r.Seed("master_seed", 0);
  m.inputs = DigestsFromJson(r, "inputs");
  m.outputs = DigestsFromJson(r, "outputs");
  const std::string digest = r.String("result_digest", "");
  m.started_utc = r.String("started_utc", "");
  m.elapsed_ms = r.Number("elapsed_ms", 0.0);
  const Json& stages = r.Raw("stages");
  if (!stages.is_array()) throw SchemaError(r.PathOf("stages") + ": expected an array");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    ObjectReader s(stages[i], r.PathOf("stages") + "[" + std::to_string(i) + "]");
    StageStatus st;
    st.name = s.String("name", "");
    st.status = s.String("status", "");
    st.millis = s.Number("millis", 0.0);
    st.detail = s.String("detail", "");
    s.Finish();
    m.stages.push_back(st);
  }
  m.exit_status = r.Int("exit_status", 0);
  r.Finish();
  if (m.command.empty()) throw SchemaError(r.PathOf("command") + ": required");
  if (digest != m.ResultDigest()) throw SchemaError(r.PathOf("result_digest") + ": does not match the output digests");
  return m;
}

}  // namespace gpmmm::io
