// Copyright 2026 The legone Authors.
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

#include "legone/benchmarks.h"

#include <gtest/gtest.h>

namespace legone {
namespace {

TEST(GoldenBoundTest, Parses) {
  GoldenBound g = GoldenBound::Parse("0.33933+δ");
  EXPECT_DOUBLE_EQ(g.value, 0.33933);
  EXPECT_TRUE(g.delta);
  EXPECT_TRUE(GoldenBound::Parse("0.6+delta").delta);
  EXPECT_TRUE(GoldenBound::Parse("0.6+d").delta);
  GoldenBound plain = GoldenBound::Parse("0.5");
  EXPECT_FALSE(plain.delta);
  EXPECT_THROW(GoldenBound::Parse("half"), std::invalid_argument);
  EXPECT_THROW(GoldenBound::Parse("0.5+x"), std::invalid_argument);
}

TEST(ManifestTest, LoadsCorpus) {
  BenchmarkManifest m = LoadManifest(DefaultManifestPath());
  std::set<std::string> ids;
  for (const auto& e : m.entries) ids.insert(e.id);
  for (const char* id : {"dmp", "bbm1", "cdffjs", "ts", "dfm", "dfm-ext3", "kps", "dmp-0.38",
                         "bbm2"}) {
    EXPECT_TRUE(ids.count(id)) << id;
  }
  for (const auto& e : m.entries) {
    if (e.id == "kps" || e.id == "bbm2" || e.id == "dmp-0.38") EXPECT_TRUE(e.manual) << e.id;
    if (e.id == "dmp" || e.id == "ts") EXPECT_FALSE(e.manual) << e.id;
  }
}

TEST(ManifestTest, MissingFileThrows) {
  EXPECT_ANY_THROW(LoadManifest("/nonexistent/manifest.json"));
}

TEST(BenchTest, FastEntriesMatchTheirGoldenValues) {
  BenchmarkManifest m = LoadManifest(DefaultManifestPath());
  BenchReport r = RunBenchmarks(m, "^(dmp|bbm1|ts|dfm-ext3|kps|kps-auto|dmp-0\\.38|bbm2)$", {});
  ASSERT_EQ(r.results.size(), 8u);
  for (const auto& res : r.results) {
    EXPECT_TRUE(res.pass) << res.entry.id << " -> " << res.certificate.BoundString(7) << " "
                          << res.error;
  }
  EXPECT_TRUE(r.AllPassed());
}

TEST(BenchTest, ReportsLabelManualEntries) {
  BenchmarkManifest m = LoadManifest(DefaultManifestPath());
  BenchReport r = RunBenchmarks(m, "^(dmp|kps)$", {});
  std::string table = BenchReportTable(r);
  EXPECT_NE(table.find("manual encoding"), std::string::npos);
  EXPECT_NE(table.find("automatic"), std::string::npos);
  nlohmann::json j = BenchReportToJson(r);
  EXPECT_EQ(j.at("total"), 2);
  for (const auto& e : j.at("entries")) {
    EXPECT_EQ(e.at("kind"), e.at("id") == "kps" ? "manual encoding" : "automatic");
  }
}

TEST(BenchTest, BrokenEntryIsRecordedNotThrown) {
  BenchmarkManifest m;
  m.directory = "/nonexistent";
  BenchmarkEntry e;
  e.id = "ghost";
  e.source = "ghost.lne";
  e.golden = GoldenBound::Parse("0.5");
  BenchmarkResult r = RunBenchmark(m, e, {});
  EXPECT_FALSE(r.ran);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.error.empty());
}

TEST(PolymatrixTest, HalfPlusDelta) {
  BoundCertificate c = ExtensionPolymatrix();
  EXPECT_TRUE(c.delta_flag);
  EXPECT_NEAR(c.bound, 0.5, 1e-4);
}

TEST(PolymatrixTest, RelaxationsMoveTheBound) {
  PolymatrixOptions relaxed;
  relaxed.tie_d_g = false;
  EXPECT_GT(ExtensionPolymatrix({}, relaxed).bound, 0.5 + 1e-3);
  PolymatrixOptions wide;
  wide.box_hi = 2;
  EXPECT_GT(std::fabs(ExtensionPolymatrix({}, wide).bound - 0.5), 1e-3);
}

TEST(VertexCoverTest, RatioTwoIsCertified) {
  VertexCoverResult r = ExtensionVertexCover();
  EXPECT_TRUE(r.certified);
  EXPECT_NEAR(r.certificate.bound, 0, 1e-6);
}

TEST(VertexCoverTest, SmallerRatioFails) {
  VertexCoverResult r = ExtensionVertexCover(10, 1.9);
  EXPECT_FALSE(r.certified);
  EXPECT_GT(r.certificate.bound, 0);
}

TEST(VertexCoverTest, DegenerateBox) {
  VertexCoverResult r = ExtensionVertexCover(0, 2);
  EXPECT_NEAR(r.certificate.bound, 0, 1e-9);
}

}  // namespace
}  // namespace legone
