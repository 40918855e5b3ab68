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

#include "run.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <sstream>

#include "gpmmm/error.hpp"

#ifndef MMMGP_VERSION
#define MMMGP_VERSION "0.0.0"
#endif

namespace mmmgp {
namespace fs = std::filesystem;
using gpmmm::SchemaError;

namespace {

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const std::map<std::string, Handler>& Handlers() {
  static const std::map<std::string, Handler> handlers{
      {"simulate", RunSimulate}, {"fit", RunFit},         {"evaluate", RunEvaluate}, {"megasim", RunMegasim},
      {"optimize", RunOptimize}, {"separate", RunSeparate}, {"theory", RunTheory},   {"plot", RunPlot}};
  return handlers;
}

}  // namespace

std::string Num(double v) { return gpmmm::io::FormatNumber(v); }

gpmmm::io::CsvTable Table(std::vector<std::string> header) {
  gpmmm::io::CsvTable t;
  t.header = std::move(header);
  return t;
}

RunContext::RunContext(const Invocation& inv)
    : arguments_(inv.arguments), out_dir_(inv.out_dir), start_(std::chrono::steady_clock::now()) {
  manifest_.tool_version = MMMGP_VERSION;
  manifest_.command = inv.command;
  manifest_.arguments = inv.arguments;
  manifest_.config = inv.config;
  manifest_.started_utc = UtcNow();
}

std::string RunContext::Argument(const std::string& key) const {
  if (!arguments_.contains(key) || !arguments_[key].is_string())
    throw SchemaError("missing required option --" + key);
  return arguments_[key].get<std::string>();
}

std::vector<std::string> RunContext::ArgumentList(const std::string& key) const {
  std::vector<std::string> out;
  if (!arguments_.contains(key)) return out;
  for (const Json& v : arguments_[key]) out.push_back(v.get<std::string>());
  return out;
}

std::string RunContext::Input(const std::string& path) {
  for (const auto& d : manifest_.inputs)
    if (d.path == path) return path;
  manifest_.inputs.push_back(gpmmm::io::DigestFile(path, path));
  return path;
}

std::uint64_t RunContext::Seed(ObjectReader& r, const std::string& key, std::uint64_t fallback) {
  std::uint64_t seed = r.Seed(key, fallback);
  if (arguments_.contains("seed")) seed = arguments_["seed"].get<std::uint64_t>();
  manifest_.master_seed = seed;
  return seed;
}

int RunContext::IntOverride(ObjectReader& r, const std::string& key, int fallback) {
  int v = r.Int(key, fallback);
  if (arguments_.contains(key)) v = arguments_[key].get<int>();
  return v;
}

void RunContext::SetConfig(Json resolved) {
  resolved.erase("schema_version");
  Json j{{"schema_version", gpmmm::io::kSchemaVersion}};
  j.update(resolved);
  manifest_.config = j;
  WriteJson("config.json", j);
}

std::string RunContext::Path(const std::string& name) const { return (fs::path(out_dir_) / name).string(); }

void RunContext::WriteText(const std::string& name, const std::string& content) {
  for (const auto& o : outputs_)
    if (o == name) throw gpmmm::Error("output written twice: " + name);
  std::FILE* f = std::fopen(Path(name).c_str(), "wb");
  if (!f) throw SchemaError("cannot write " + Path(name));
  const bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size();
  if (std::fclose(f) != 0 || !ok) throw gpmmm::Error("write failed: " + Path(name));
  outputs_.push_back(name);
}

void RunContext::WriteJson(const std::string& name, const Json& j) { WriteText(name, gpmmm::io::DumpJson(j)); }

void RunContext::WriteCsv(const std::string& name, const gpmmm::io::CsvTable& table) {
  std::ostringstream out;
  gpmmm::io::WriteCsv(out, table);
  WriteText(name, out.str());
}

void RunContext::Stage(const std::string& name, const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  gpmmm::io::StageStatus s{name, "ok", 0.0, ""};
  try {
    fn();
  } catch (const std::exception& e) {
    s.status = "failed";
    s.detail = e.what();
    s.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    manifest_.stages.push_back(s);
    throw;
  }
  s.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  manifest_.stages.push_back(s);
}

gpmmm::io::RunManifest RunContext::Finish(int exit_status) {
  manifest_.outputs.clear();
  for (const auto& name : outputs_) manifest_.outputs.push_back(gpmmm::io::DigestFile(Path(name), name));
  manifest_.exit_status = exit_status;
  manifest_.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  gpmmm::io::WriteJson(Path("manifest.json"), gpmmm::io::ToJson(manifest_));
  return manifest_;
}

gpmmm::io::RunManifest Execute(const Invocation& inv) {
  const auto it = Handlers().find(inv.command);
  if (it == Handlers().end()) throw SchemaError("unknown command '" + inv.command + "'");
  if (inv.out_dir.empty()) throw SchemaError("missing required option --out");
  std::error_code ec;
  fs::create_directories(inv.out_dir, ec);
  if (ec) throw SchemaError("cannot create " + inv.out_dir + ": " + ec.message());
  RunContext ctx(inv);
  try {
    it->second(ctx, inv.config);
  } catch (const gpmmm::SchemaError&) {
    ctx.Finish(1);
    throw;
  } catch (const gpmmm::DomainError&) {
    ctx.Finish(1);
    throw;
  } catch (const gpmmm::InfeasibleError&) {
    ctx.Finish(1);
    throw;
  } catch (...) {
    ctx.Finish(2);
    throw;
  }
  return ctx.Finish(0);
}

ReplayOutcome Replay(const std::string& manifest_path, const std::string& out_dir) {
  const gpmmm::io::RunManifest m = gpmmm::io::ManifestFromJson(gpmmm::io::ReadJson(manifest_path), manifest_path);
  if (m.exit_status != 0) throw SchemaError(manifest_path + ": the recorded run did not succeed");
  ReplayOutcome out;
  out.expected_digest = m.ResultDigest();
  for (const auto& in : m.inputs) {
    std::string actual;
    try {
      actual = gpmmm::io::Sha256File(in.path);
    } catch (const SchemaError&) {
      actual = "missing";
    }
    if (actual != in.sha256) {
      out.inputs_match = false;
      out.mismatches.push_back("input " + in.path + ": expected " + in.sha256 + ", found " + actual);
    }
  }
  if (!out.inputs_match) return out;

  if (fs::exists(fs::path(out_dir) / "manifest.json") &&
      fs::weakly_canonical(fs::path(out_dir) / "manifest.json") == fs::weakly_canonical(manifest_path))
    throw SchemaError("replay --out must differ from the recorded run directory");
  Invocation inv{m.command, m.arguments, m.config, out_dir};
  const gpmmm::io::RunManifest again = Execute(inv);
  out.actual_digest = again.ResultDigest();
  out.reproduced = out.actual_digest == out.expected_digest;
  for (std::size_t i = 0; i < std::max(m.outputs.size(), again.outputs.size()); ++i) {
    const std::string a = i < m.outputs.size() ? m.outputs[i].path + " " + m.outputs[i].sha256 : "(none)";
    const std::string b = i < again.outputs.size() ? again.outputs[i].path + " " + again.outputs[i].sha256 : "(none)";
    if (a != b) out.mismatches.push_back("output expected " + a + ", found " + b);
  }
  return out;
}

}  // namespace mmmgp
