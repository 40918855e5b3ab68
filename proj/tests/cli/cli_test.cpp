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

// End-to-end runs of the mmmgp executable.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <unistd.h>

#include "gpmmm/io/csv.hpp"
#include "gpmmm/io/json.hpp"

namespace {

namespace fs = std::filesystem;
using gpmmm::io::Json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gpmmm_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    if (!HasFailure()) fs::remove_all(dir_);
  }

  int Run(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" MMMGP_EXE "' " + args + " > out.log 2> err.log";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  void Write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }
  std::string Read(const std::string& name) {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  Json ReadJson(const std::string& name) { return gpmmm::io::ParseJson(Read(name), name); }

  fs::path dir_;
};

TEST_F(CliTest, SigmoidPipelineConflates) {
  Write("sim.json", R"({"generator": "sigmoid"})");
  ASSERT_EQ(Run("simulate -c sim.json -o sim"), 0) << Read("err.log");
  ASSERT_EQ(Run("evaluate -d sim/dataset.csv -o eval"), 0) << Read("err.log");
  const Json e = ReadJson("eval/evaluation.json");
  EXPECT_EQ(e["schema_version"], 1);
  EXPECT_TRUE(e["valid"].get<bool>());
  EXPECT_TRUE(e["conflated"].get<bool>());
  EXPECT_EQ(e["true"]["model"], "nonlinear_gp");
  EXPECT_LE(e["competing"]["mse"].get<double>(), e["true"]["mse"].get<double>());
}

TEST_F(CliTest, ManifestRecordsSeedConfigAndDigests) {
  ASSERT_EQ(Run("simulate --seed 17 -o sim"), 0) << Read("err.log");
  const Json m = ReadJson("sim/manifest.json");
  EXPECT_EQ(m["document"], "gpmmm.manifest");
  EXPECT_EQ(m["master_seed"], 17u);
  EXPECT_EQ(m["config"]["seed"], 17u);
  EXPECT_EQ(m["config"]["dgp"]["kind"], "nonlinear_gp");
  EXPECT_EQ(m["exit_status"], 0);
  EXPECT_GE(m["outputs"].size(), 3u);
  EXPECT_EQ(ReadJson("sim/config.json"), m["config"]);
}

TEST_F(CliTest, ReplayReproducesAndDetectsChangedInputs) {
  ASSERT_EQ(Run("simulate -o sim"), 0);
  ASSERT_EQ(Run("fit -d sim/dataset.csv -o fit"), 0) << Read("err.log");
  ASSERT_EQ(Run("replay fit/manifest.json -o again"), 0) << Read("err.log");
  EXPECT_EQ(Read("out.log").rfind("reproduced ", 0), 0u);
  EXPECT_EQ(Read("fit/model.json"), Read("again/model.json"));
  Write("sim/dataset.csv", Read("sim/dataset.csv") + "\n");
  EXPECT_EQ(Run("replay fit/manifest.json -o again2"), 1);
  EXPECT_NE(Read("err.log").find("inputs changed"), std::string::npos);
}

TEST_F(CliTest, UserErrorsExitOne) {
  Write("bad.json", R"({"seed": 1, "modle": {}})");
  Write("gap.csv", "t,y,x_tv\n1,2,3\n2,3,4\n4,5,6\n");
  Write("syntax.json", "{\n  \"seed\": ,\n}");
  ASSERT_EQ(Run("simulate -o sim"), 0);
  EXPECT_EQ(Run("fit -d sim/dataset.csv -c bad.json -o x"), 1);
  EXPECT_NE(Read("err.log").find("config.modle: unknown key"), std::string::npos) << Read("err.log");
  EXPECT_EQ(Run("fit -d gap.csv -o x"), 1);
  EXPECT_NE(Read("err.log").find("period 3 is missing"), std::string::npos) << Read("err.log");
  EXPECT_EQ(Run("fit -d sim/dataset.csv -c syntax.json -o x"), 1);
  EXPECT_NE(Read("err.log").find("line 2, column"), std::string::npos) << Read("err.log");
  EXPECT_EQ(Run("frobnicate"), 1);
  EXPECT_EQ(Run("fit -o x"), 1);
  EXPECT_EQ(Run("--help"), 0);
}

TEST_F(CliTest, PlotDrawsOnePolylinePerSeries) {
  Write("three.csv", "t,a,b\n1,1,3\n2,4,2\n3,9,1\n4,16,0\n");
  ASSERT_EQ(Run("plot three.csv -o p"), 0) << Read("err.log");
  const std::string svg = Read("p/plot.svg");
  std::size_t polylines = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
  EXPECT_EQ(polylines, 2u);
  EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\""), std::string::npos);
}

TEST_F(CliTest, ComponentsPlotWithBands) {
  ASSERT_EQ(Run("simulate -o sim"), 0);
  Write("tv.json", R"({"model": {"kind": "time_varying_gp"}})");
  ASSERT_EQ(Run("fit -d sim/dataset.csv -c tv.json -o fit"), 0) << Read("err.log");
  Write("plot.json", R"({"x": "x", "y": ["mean"], "group": "component"})");
  ASSERT_EQ(Run("plot fit/components.csv -c plot.json -o p"), 0) << Read("err.log");
  const std::string svg = Read("p/plot.svg");
  EXPECT_NE(svg.find("<polygon"), std::string::npos);
  EXPECT_NE(svg.find("spend mean 95%"), std::string::npos);
}

TEST_F(CliTest, SparseChannelBecomesDummy) {
  std::string csv = "t,y,x_tv,x_event\n";
  for (int t = 1; t <= 30; ++t)
    csv += std::to_string(t) + "," + std::to_string(10 + t % 7) + "," + std::to_string(5 + (t * 3) % 11) + "," +
           (t == 12 ? "4" : "0") + "\n";
  Write("data.csv", csv);
  Write("fit.json", R"({"data": {"sparse_threshold": 0.1}})");
  ASSERT_EQ(Run("fit -d data.csv -c fit.json -o fit"), 0) << Read("err.log");
  const Json r = ReadJson("fit/fit_report.json");
  ASSERT_EQ(r["sparse_converted"].size(), 1u);
  EXPECT_EQ(r["sparse_converted"][0]["channel"], "event");
  EXPECT_EQ(r["dummies"], Json::array({"event"}));
  EXPECT_EQ(r["channels"], Json::array({"tv", "event"}));
}

TEST_F(CliTest, OptimizeLogLogClosedForm) {
  Write("opt.json", R"({"mode": "loglog", "alpha": 0, "beta": 0.5})");
  ASSERT_EQ(Run("optimize -c opt.json -o o"), 0) << Read("err.log");
  EXPECT_EQ(ReadJson("o/report.json")["spend"].get<double>(), 0.25);
  Write("bad.json", R"({"mode": "loglog", "alpha": 0, "beta": 1.5})");
  EXPECT_EQ(Run("optimize -c bad.json -o o2"), 1);
}

TEST_F(CliTest, TheoryReport) {
  ASSERT_EQ(Run("theory -o th"), 0) << Read("err.log");
  const Json t = ReadJson("th/theory.json");
  EXPECT_TRUE(t["all_passed"].get<bool>());
  EXPECT_TRUE(t["monotone_demo"]["passed"].get<bool>());
  EXPECT_EQ(Read("th/theory.txt").find("FAIL"), std::string::npos);
}

}  // namespace
