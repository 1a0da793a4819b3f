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

#include "legone/discovery.h"

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "legone/pipeline.h"
#include "test_util.h"

namespace legone {
namespace {

namespace fs = std::filesystem;

const char* kDmpBody =
    "players 2\ndef a():\n  i = Random1()\n  j = BestResponse2(i)\n  k = BestResponse1(j)\nend\n";
const char* kDmpRenamed =
    "players 2\ndef b():\n  p = Random1()\n  q = BestResponse2(p)\n  r = BestResponse1(q)\nend\n";
const char* kBbm =
    "players 2\ndef bbm():\n  x, y = ZeroSumNE12(u2 - u1)\n  r = BestResponse1(y)\n"
    "  b = BestResponse2(r)\nend\n";

std::string Fenced(const std::string& program) {
  return "Proposal:\n```\n" + program + "```\nThanks.";
}

class DiscoveryTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("legone_discovery_" + std::string(::testing::UnitTest::GetInstance()
                                                  ->current_test_info()
                                                  ->name()));
    fs::remove_all(dir_);
    config_.allowlist = AllowlistPreset("all");
    config_.session_dir = dir_.string();
    config_.retry_backoff_seconds = 0;
    config_.transport_retries = 0;
    config_.solver.restarts = 16;
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  DiscoveryConfig config_;
};

TEST(AllowlistTest, Presets) {
  auto pre = AllowlistPreset("pre2007");
  auto all = AllowlistPreset("all");
  EXPECT_EQ(std::count(pre.begin(), pre.end(), "StationaryPoint"), 0);
  EXPECT_EQ(std::count(all.begin(), all.end(), "StationaryPoint"), 1);
  EXPECT_THROW(AllowlistPreset("future"), std::invalid_argument);
}

TEST(PromptTest, AllowlistShapesTheBlockManifest) {
  DiscoveryConfig c;
  c.allowlist = AllowlistPreset("pre2007");
  std::string p = BuildInitialPrompt(c);
  EXPECT_EQ(p.find("StationaryPoint12"), std::string::npos);
  EXPECT_NE(p.find("ZeroSumNE12"), std::string::npos);
  c.allowlist = AllowlistPreset("all");
  EXPECT_NE(BuildInitialPrompt(c).find("StationaryPoint12"), std::string::npos);
}

TEST(PromptTest, StationaryRequirementLine) {
  DiscoveryConfig c;
  c.allowlist = AllowlistPreset("all");
  std::string without = BuildInitialPrompt(c);
  c.require_stationary_point = true;
  std::string with = BuildInitialPrompt(c);
  EXPECT_GT(with.size(), without.size());
  EXPECT_NE(with.find("at least one StationaryPoint"), std::string::npos);
  EXPECT_EQ(without.find("at least one StationaryPoint"), std::string::npos);
}

TEST(PromptTest, EmptyAllowlistIsRejected) {
  DiscoveryConfig c;
  EXPECT_THROW(BuildInitialPrompt(c), std::invalid_argument);
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST(FeedbackTest, EmbedsDiagnosticsVerbatim) {
  AttemptRecord a;
  a.outcome = AttemptOutcome::kSyntaxError;
  a.diagnostics = {"program:2:7: error[SyntaxError]: expected ')', found ':'"};
  std::string p = BuildFeedbackPrompt(a, {});
  EXPECT_NE(p.find(a.diagnostics[0]), std::string::npos);
}

TEST(FeedbackTest, StatesCurrentAndBestBounds) {
  AttemptRecord a;
  a.outcome = AttemptOutcome::kAnalyzed;
  a.bound = 0.55;
  a.bound_text = "0.55000";
  FeedbackContext ctx;
  ctx.best_bound = 0.5;
  std::string p = BuildFeedbackPrompt(a, ctx);
  EXPECT_NE(p.find("0.55000"), std::string::npos);
  EXPECT_NE(p.find("0.50000"), std::string::npos);
}

TEST(FeedbackTest, DuplicatesShowHistory) {
  std::vector<AttemptRecord> history(2);
  history[0].round = 1;
  history[0].outcome = AttemptOutcome::kAnalyzed;
  history[0].bound_text = "0.50000";
  history[1].round = 2;
  history[1].outcome = AttemptOutcome::kDuplicate;
  history[1].duplicate_of = 1;
  FeedbackContext ctx;
  ctx.history = &history;
  std::string p = BuildFeedbackPrompt(history[1], ctx);
  EXPECT_NE(p.find("round 1: Analyzed, bound 0.50000"), std::string::npos) << p;
  EXPECT_NE(p.find("round 2: Duplicate"), std::string::npos) << p;
}

TEST(HashTest, InvariantUnderRenaming) {
  SourceProgram a = testing::MustParse(kDmpBody);
  SourceProgram b = testing::MustParse(kDmpRenamed);
  SourceProgram c = testing::MustParse(kBbm);
  EXPECT_EQ(CanonicalHash(a), CanonicalHash(b));
  EXPECT_NE(CanonicalHash(a), CanonicalHash(c));
  EXPECT_EQ(CanonicalHash(a).size(), 16u);
}

TEST(ExtractTest, TakesFencedCode) {
  EXPECT_EQ(ExtractProgram(Fenced(kDmpBody)), kDmpBody);
  EXPECT_EQ(ExtractProgram("```text\nnote\n```\n```lne\n" + std::string(kBbm) + "```"), kBbm);
  EXPECT_EQ(ExtractProgram(kBbm), kBbm);
}

TEST(ConfigTest, JsonRoundTripAndValidation) {
  nlohmann::json j{{"allowlist", "pre2007"}, {"max_rounds", 7}, {"temperature", 0.2}};
  DiscoveryConfig c = DiscoveryConfigFromJson(j);
  EXPECT_EQ(c.max_rounds, 7);
  EXPECT_EQ(c.allowlist, AllowlistPreset("pre2007"));
  DiscoveryConfig back = DiscoveryConfigFromJson(DiscoveryConfigToJson(c));
  EXPECT_EQ(DiscoveryConfigToJson(back), DiscoveryConfigToJson(c));
  j["duplicate_threshold"] = 0;
  EXPECT_THROW(DiscoveryConfigFromJson(j), std::invalid_argument);
}

TEST(MockTransportTest, ReplaysAndFails) {
  MockTransport t({"a", "!transport-error"});
  DiscoveryConfig c;
  EXPECT_EQ(t.Complete({{"user", "hi"}}, c), "a");
  EXPECT_THROW(t.Complete({}, c), TransportError);
  EXPECT_THROW(t.Complete({}, c), TransportError);
  EXPECT_EQ(t.requests().size(), 3u);
}

TEST(HttpTransportTest, UnreachableEndpointIsATransportError) {
  DiscoveryConfig c;
  c.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  HttpTransport t;
  EXPECT_THROW(t.Complete({{"user", "hi"}}, c), TransportError);
  c.endpoint = "not a url";
  EXPECT_THROW(t.Complete({{"user", "hi"}}, c), TransportError);
}

TEST_F(DiscoveryTest, RepeatedProgramRestartsAtThreshold) {
  config_.max_rounds = 5;
  config_.duplicate_threshold = 3;
  MockTransport t(std::vector<std::string>(5, Fenced(kDmpBody)));
  SessionReport r = RunLoop(config_, t);
  ASSERT_EQ(r.attempts.size(), 5u);
  EXPECT_EQ(r.attempts[0].outcome, AttemptOutcome::kAnalyzed);
  for (int k = 1; k < 5; ++k) EXPECT_EQ(r.attempts[k].outcome, AttemptOutcome::kDuplicate);
  ASSERT_EQ(r.restarts.size(), 1u);
  EXPECT_EQ(r.restarts[0].round, 4);
  EXPECT_EQ(r.restarts[0].reason, "duplicate");
  // The request after a restart opens a fresh conversation.
  EXPECT_EQ(t.requests()[4].size(), 1u);
}

TEST_F(DiscoveryTest, EndpointDown) {
  config_.max_rounds = 3;
  MockTransport t({"!transport-error", "!transport-error", "!transport-error"});
  SessionReport r = RunLoop(config_, t);
  EXPECT_EQ(r.Count(AttemptOutcome::kTransportError), 3u);
  EXPECT_EQ(r.Count(AttemptOutcome::kAnalyzed), 0u);
  EXPECT_FALSE(r.best_round.has_value());
}

TEST_F(DiscoveryTest, RetriesRecoverFromTransientFailures) {
  config_.max_rounds = 1;
  config_.transport_retries = 2;
  MockTransport t({"!transport-error", "!transport-error", Fenced(kDmpBody)});
  SessionReport r = RunLoop(config_, t);
  ASSERT_EQ(r.attempts.size(), 1u);
  EXPECT_EQ(r.attempts[0].outcome, AttemptOutcome::kAnalyzed);
}

TEST_F(DiscoveryTest, CapsAndAllowlistReject) {
  config_.max_rounds = 4;
  config_.line_cap = 5;
  config_.allowlist = AllowlistPreset("pre2007");
  std::string sp = "players 2\ndef s():\n  x, y, w, z = StationaryPoint12()\nend\n";
  std::string three = "players 3\ndef t():\n  a = Random1()\n  b = Random2()\n  c = Random3()\nend\n";
  std::string shorter = "players 2\ndef u():\n  i = Random1()\n  j = BestResponse2(i)\nend\n";
  MockTransport t({Fenced(kBbm), Fenced(sp), Fenced(three), Fenced(shorter)});
  SessionReport r = RunLoop(config_, t);
  ASSERT_EQ(r.attempts.size(), 4u);
  EXPECT_EQ(r.attempts[0].outcome, AttemptOutcome::kRejected);
  EXPECT_NE(r.attempts[0].message.find("lines"), std::string::npos);
  EXPECT_EQ(r.attempts[1].outcome, AttemptOutcome::kRejected);
  EXPECT_NE(r.attempts[1].message.find("StationaryPoint"), std::string::npos);
  EXPECT_EQ(r.attempts[2].outcome, AttemptOutcome::kRejected);
  EXPECT_NE(r.attempts[2].message.find("players"), std::string::npos);
  EXPECT_EQ(r.attempts[3].outcome, AttemptOutcome::kAnalyzed);
}

TEST_F(DiscoveryTest, RequireStationaryPoint) {
  config_.max_rounds = 1;
  config_.require_stationary_point = true;
  MockTransport t({Fenced(kDmpBody)});
  SessionReport r = RunLoop(config_, t);
  EXPECT_EQ(r.attempts[0].outcome, AttemptOutcome::kRejected);
}

TEST_F(DiscoveryTest, AnalyzerTimeout) {
  config_.max_rounds = 1;
  config_.analyzer_timeout_seconds = 1e-9;
  MockTransport t({Fenced(testing::BenchmarkSource("ts.lne"))});
  SessionReport r = RunLoop(config_, t);
  EXPECT_EQ(r.attempts[0].outcome, AttemptOutcome::kAnalyzerTimeout);
}

TEST_F(DiscoveryTest, PersistsAndResumes) {
  config_.max_rounds = 2;
  MockTransport first({Fenced(kDmpBody), "garbage ("});
  SessionReport r1 = RunLoop(config_, first);
  ASSERT_EQ(r1.attempts.size(), 2u);
  EXPECT_TRUE(fs::exists(dir_ / "session.json"));
  EXPECT_TRUE(fs::exists(dir_ / "attempts/001.lne"));
  EXPECT_TRUE(fs::exists(dir_ / "attempts/001.cert.json"));
  EXPECT_TRUE(fs::exists(dir_ / "attempts/002.lne"));
  EXPECT_FALSE(fs::exists(dir_ / "attempts/002.cert.json"));

  config_.max_rounds = 4;
  MockTransport second({Fenced(kDmpRenamed), Fenced(kBbm)});
  SessionReport r2 = RunLoop(config_, second);
  ASSERT_EQ(r2.attempts.size(), 4u);
  EXPECT_EQ(r2.attempts[2].round, 3);
  EXPECT_EQ(r2.attempts[2].outcome, AttemptOutcome::kDuplicate);
  EXPECT_EQ(r2.attempts[2].duplicate_of, 1);
  EXPECT_EQ(r2.attempts[3].outcome, AttemptOutcome::kAnalyzed);

  nlohmann::json saved = nlohmann::json::parse(ReadTextFile((dir_ / "session.json").string()));
  EXPECT_EQ(saved.at("attempts").size(), 4u);
  EXPECT_EQ(saved.at("best").at("round"), *r2.best_round);
}

TEST_F(DiscoveryTest, CertificatesAreReproducible) {
  config_.max_rounds = 1;
  MockTransport t({Fenced(kBbm)});
  SessionReport r = RunLoop(config_, t);
  ASSERT_EQ(r.attempts[0].outcome, AttemptOutcome::kAnalyzed);
  std::string program = ReadTextFile((dir_ / r.attempts[0].program_path).string());
  nlohmann::json cert =
      nlohmann::json::parse(ReadTextFile((dir_ / r.attempts[0].certificate_path).string()));
  CompiledProgram cp = CompileSource(program, "rerun");
  BoundCertificate again = SolveBuiltin(cp.problem, config_.solver);
  EXPECT_NEAR(again.bound, cert.at("bound").get<double>(), 1e-9);
}

TEST_F(DiscoveryTest, StopFileEndsTheSession) {
  config_.max_rounds = 3;
  fs::create_directories(dir_);
  std::ofstream(dir_ / "STOP") << "";
  MockTransport t({Fenced(kDmpBody)});
  SessionReport r = RunLoop(config_, t);
  EXPECT_TRUE(r.stopped);
  EXPECT_TRUE(r.attempts.empty());
  EXPECT_NE(SessionTable(r).find("stopped"), std::string::npos);
}

TEST_F(DiscoveryTest, HistoryLimitRestartsTheConversation) {
  config_.max_rounds = 4;
  config_.history_restart = 4;
  MockTransport t({"x (", "y (", "z (", "w ("});
  SessionReport r = RunLoop(config_, t);
  ASSERT_FALSE(r.restarts.empty());
  EXPECT_EQ(r.restarts[0].reason, "history");
}

}  // namespace
}  // namespace legone
