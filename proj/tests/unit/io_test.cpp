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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gpmmm/dgp_sim.hpp"
#include "gpmmm/error.hpp"
#include "gpmmm/io/csv.hpp"
#include "gpmmm/io/json.hpp"
#include "gpmmm/io/manifest.hpp"
#include "gpmmm/io/model_io.hpp"
#include "gpmmm/io/svg.hpp"

namespace gpmmm::io {
namespace {

std::string ErrorOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

Dataset Parse(const std::string& text, const LoadOptions& options = {}) {
  std::istringstream in(text);
  return ParseDataset(in, "data.csv", nullptr, options);
}

std::size_t Count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

TEST(CsvTest, MinimalFileHasNoChannels) {
  const Dataset d = Parse("t,y\n1,2.5\n2,3\n3,4\n");
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.num_channels(), 0u);
  EXPECT_DOUBLE_EQ(d.outcome[1], 3.0);
}

TEST(CsvTest, NegativeSpendNamesLineAndColumn) {
  const std::string msg = ErrorOf([] { Parse("t,y,x_tv\n1,2,5\n2,3,-1\n"); });
  EXPECT_NE(msg.find("line 3, column 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("negative spend"), std::string::npos) << msg;
  LoadOptions allow;
  allow.allow_negative_spend = true;
  EXPECT_TRUE(Parse("t,y,x_tv\n1,2,5\n2,3,-1\n", allow).signed_spend);
}

TEST(CsvTest, GapNamesMissingPeriod) {
  const std::string msg = ErrorOf([] { Parse("t,y\n1,2\n2,3\n4,5\n"); });
  EXPECT_NE(msg.find("period 3 is missing"), std::string::npos) << msg;
}

TEST(CsvTest, RejectsBadInput) {
  EXPECT_NE(ErrorOf([] { Parse("t,y,z\n1,2,3\n"); }).find("unknown column 'z'"), std::string::npos);
  EXPECT_NE(ErrorOf([] { Parse("t,y,d_promo\n1,2,0.5\n"); }).find("0 or 1"), std::string::npos);
  EXPECT_NE(ErrorOf([] { Parse("t,y\n1,abc\n"); }).find("line 2, column 2"), std::string::npos);
  EXPECT_NE(ErrorOf([] { Parse("t,y\n1,2,3\n"); }).find("expected 2 cells"), std::string::npos);
  EXPECT_NE(ErrorOf([] { Parse("y\n1\n"); }).find("'t'"), std::string::npos);
}

TEST(CsvTest, QuotedCellsAndRoundTrip) {
  const Dataset d = Parse("t,date,y,x_search,d_promo\n1,\"Jan, 1\",2.25,0.1,0\n2,\"Jan, 8\",3,0.2,1\n");
  ASSERT_EQ(d.dates.size(), 2u);
  EXPECT_EQ(d.dates[0], "Jan, 1");
  std::ostringstream out;
  WriteCsv(out, DatasetTable(d));
  const Dataset back = Parse(out.str());
  EXPECT_EQ(back.dates, d.dates);
  EXPECT_EQ(back.outcome, d.outcome);
  EXPECT_EQ(back.channels[0].values, d.channels[0].values);
  EXPECT_EQ(back.dummies[0].name, "promo");
}

TEST(CsvTest, FormatNumberRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345678.9}) EXPECT_EQ(std::stod(FormatNumber(v)), v);
  EXPECT_EQ(FormatNumber(2.0), "2");
}

TEST(CsvTest, SparseChannelsBecomeDummies) {
  Dataset d = Parse("t,y,x_tv,x_event\n1,1,5,0\n2,1,6,0\n3,1,7,9\n4,1,8,0\n5,1,9,0\n"
                    "6,1,5,0\n7,1,5,0\n8,1,5,0\n9,1,5,0\n10,1,5,0\n11,1,5,0\n");
  const auto converted = ConvertSparseChannels(d);
  ASSERT_EQ(converted.size(), 1u);
  EXPECT_EQ(converted[0].channel, "event");
  EXPECT_NEAR(converted[0].active_share, 1.0 / 11.0, 1e-12);
  ASSERT_EQ(d.num_channels(), 1u);
  ASSERT_EQ(d.dummies.size(), 1u);
  EXPECT_DOUBLE_EQ(d.dummies[0].values[2], 1.0);
  EXPECT_DOUBLE_EQ(d.dummies[0].values[0], 0.0);
}

TEST(JsonTest, ParseErrorHasLineAndColumn) {
  const std::string msg = ErrorOf([] { ParseJson("{\n  \"a\": 1,\n  \"b\": ]\n}", "cfg.json"); });
  EXPECT_NE(msg.find("cfg.json: line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(JsonTest, UnknownKeysAreRejected) {
  const Json j = ParseJson(R"({"kind": "nonlinear_gp", "intercpt": "none"})");
  const std::string msg = ErrorOf([&] { ModelSpecFromJson(ObjectReader(j, "model")); });
  EXPECT_NE(msg.find("intercpt"), std::string::npos) << msg;
}

TEST(JsonTest, TypeErrorsNameThePath) {
  const Json j = ParseJson(R"({"inference": {"restarts": "three"}})");
  const std::string msg = ErrorOf([&] { ModelSpecFromJson(ObjectReader(j, "model")); });
  EXPECT_NE(msg.find("model.inference.restarts"), std::string::npos) << msg;
}

TEST(JsonTest, UnsupportedSchemaVersion) {
  const Json j = ParseJson(R"({"schema_version": 99})");
  ObjectReader r(j, "doc");
  EXPECT_THROW(CheckSchemaVersion(r), SchemaError);
}

TEST(JsonTest, SpecsRoundTrip) {
  mmm::ModelSpec spec = mmm::TimeVaryingSpec();
  spec.intercept = mmm::InterceptKind::kTrendSeason;
  spec.carryover = transforms::StockSpec{};
  spec.inference.mode = mmm::InferenceMode::kMetropolis;
  const Json a = ToJson(spec);
  EXPECT_EQ(ToJson(ModelSpecFromJson(ObjectReader(a, "m"))), a);

  sim::DgpSpec dgp;
  dgp.kind = sim::DgpKind::kHill;
  const Json b = ToJson(dgp);
  EXPECT_EQ(ToJson(DgpFromJson(ObjectReader(b, "d"))), b);

  sep::SeparationConfig sc;
  const Json c = ToJson(sc);
  EXPECT_EQ(ToJson(SeparationFromJson(ObjectReader(c, "s"))), c);
}

TEST(ModelIoTest, SavedModelReproducesPredictions) {
  sim::SpendingSpec spending;
  spending.periods = 40;
  const Dataset data = sim::GenDataset({}, spending, 11).ToDataset("tv");
  const mmm::FittedModel m = mmm::Fit(data, mmm::NonlinearSpec(), 3);
  const std::string first = DumpJson(ModelToJson(m));
  const mmm::FittedModel back = ModelFromJson(ParseJson(first), "model.json");
  EXPECT_EQ(Sha256Hex(DumpJson(ModelToJson(back))), Sha256Hex(first));
  const auto p = mmm::Predict(m, {41, 42}, {{30.0, 60.0}});
  const auto q = mmm::Predict(back, {41, 42}, {{30.0, 60.0}});
  EXPECT_EQ(p.mean, q.mean);
  EXPECT_EQ(p.variance, q.variance);
}

TEST(ModelIoTest, RejectsForeignDocument) {
  const Json j = ParseJson(R"({"schema_version": 1, "document": "gpmmm.manifest"})");
  EXPECT_THROW(ModelFromJson(j, "x.json"), SchemaError);
}

TEST(ManifestTest, Sha256KnownVector) {
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(ManifestTest, RoundTripAndTamperDetection) {
  RunManifest m;
  m.tool_version = "0.3.0";
  m.command = "fit";
  m.master_seed = 42;
  m.config = Json{{"kind", "hill"}};
  m.outputs.push_back({"model.json", Sha256Hex("x"), 1});
  m.stages.push_back({"fit", "ok", 12.5, ""});
  const Json j = ToJson(m);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  const RunManifest back = ManifestFromJson(j);
  EXPECT_EQ(back.ResultDigest(), m.ResultDigest());
  EXPECT_EQ(back.master_seed, 42u);
  Json bad = j;
  bad["outputs"][0]["sha256"] = Sha256Hex("y");
  EXPECT_THROW(ManifestFromJson(bad), SchemaError);
}

TEST(ManifestTest, DigestFile) {
  const auto path = std::filesystem::temp_directory_path() / "gpmmm_io_test_digest.txt";
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("abc", f);
    std::fclose(f);
  }
  const FileDigest d = DigestFile(path.string(), "digest.txt");
  EXPECT_EQ(d.path, "digest.txt");
  EXPECT_EQ(d.bytes, 3u);
  EXPECT_EQ(d.sha256, Sha256Hex("abc"));
  std::filesystem::remove(path);
  EXPECT_THROW(Sha256File(path.string()), SchemaError);
}

TEST(SvgTest, OnePolylinePerLineSeries) {
  SvgPlot p;
  p.title = "beta <t> & band";
  p.series.push_back({"a", {1, 2, 3}, {1, 4, 9}, false});
  p.series.push_back({"b", {1, 2, 3}, {2, 3, std::nan("")}, false});
  p.series.push_back({"obs", {1, 2, 3}, {1, 2, 3}, true});
  p.bands.push_back({"95%", {1, 2, 3}, {0, 1, 2}, {2, 5, 10}});
  const std::string svg = RenderSvg(p);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  EXPECT_EQ(Count(svg, "<polyline"), 2u);
  EXPECT_EQ(Count(svg, "<polygon"), 1u);
  EXPECT_EQ(Count(svg, "<circle"), 3u);
  EXPECT_NE(svg.find("beta &lt;t&gt; &amp; band"), std::string::npos);
  EXPECT_EQ(Count(svg, "<svg"), 1u);
  EXPECT_EQ(Count(svg, "</svg>"), 1u);
  EXPECT_EQ(svg, RenderSvg(p));
}

TEST(SvgTest, RejectsEmptyAndMismatched) {
  SvgPlot p;
  EXPECT_THROW(RenderSvg(p), DomainError);
  p.series.push_back({"a", {1, 2}, {1}, false});
  EXPECT_THROW(RenderSvg(p), DomainError);
}

}  // namespace
}  // namespace gpmmm::io
