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

#include "legone/dsl.h"

#include <gtest/gtest.h>

#include "test_util.h"

namespace legone {
namespace {

using testing::kDmpSource;
using testing::MustParse;

bool HasCode(const ParseResult& r, const std::string& code) {
  for (const auto& d : r.diagnostics) {
    if (d.code == code) return true;
  }
  return false;
}

TEST(DslTest, ParsesDmp) {
  SourceProgram p = MustParse(kDmpSource);
  EXPECT_EQ(p.player_count, 2);
  EXPECT_EQ(p.algorithm.name, "dmp");
  ASSERT_EQ(p.algorithm.statements.size(), 5u);
  EXPECT_EQ(p.algorithm.statements[1].block, "BestResponse2");
  ASSERT_TRUE(p.algorithm.return_profile.has_value());
  EXPECT_EQ(*p.algorithm.return_profile, (std::vector<std::string>{"r1", "r2"}));
}

TEST(DslTest, EmptyBodyIsLegal) {
  ParseResult r = Parse("players 2\ndef empty():\nend\n");
  ASSERT_TRUE(r.program.has_value());
  EXPECT_TRUE(r.program->algorithm.statements.empty());
}

TEST(DslTest, ReassignmentIsAnSsaViolation) {
  ParseResult r = ParseAndCheck(
      "players 2\ndef a():\n  k = Random1()\n  k = Random1()\nend\n");
  EXPECT_FALSE(r.program.has_value());
  ASSERT_TRUE(HasCode(r, "SSAViolation"));
  for (const auto& d : r.diagnostics) {
    if (d.code == "SSAViolation") EXPECT_EQ(d.loc.line, 4);
  }
}

TEST(DslTest, ZeroSumOverPayoffDifferenceTypechecks) {
  SourceProgram p = MustParse(
      "players 2\ndef a():\n  x, y = ZeroSumNE12(u1 - u2)\n  return x, y\nend\n");
  ASSERT_EQ(p.algorithm.statements.size(), 1u);
  EXPECT_EQ(p.algorithm.statements[0].args[0].kind, Argument::Kind::kPayoff);
}

TEST(DslTest, MixingAcrossPlayersIsATypeMismatch) {
  ParseResult r = ParseAndCheck(
      "players 2\ndef a():\n  i = Random1()\n  j = Random2()\n"
      "  m = UniformMixing1(i, j)\n  return m, j\nend\n");
  EXPECT_FALSE(r.program.has_value());
  EXPECT_TRUE(HasCode(r, "TypeMismatch"));
}

TEST(DslTest, BestResponseNeedsOpponentStrategy) {
  ParseResult r = ParseAndCheck(
      "players 2\ndef a():\n  j = Random2()\n  k = BestResponse2(j)\n  return j, k\nend\n");
  EXPECT_FALSE(r.program.has_value());
  EXPECT_TRUE(HasCode(r, "TypeMismatch"));
}

TEST(DslTest, UnknownBlockAndArity) {
  EXPECT_TRUE(HasCode(ParseAndCheck("players 2\ndef a():\n  i = Nope1()\nend\n"),
                      "UnknownBlock"));
  EXPECT_TRUE(HasCode(
      ParseAndCheck("players 2\ndef a():\n  i = Random1()\n  j = BestResponse2(i, i)\nend\n"),
      "ArityMismatch"));
}

TEST(DslTest, SyntaxErrorsCarryLocations) {
  ParseResult r = Parse("players 2\ndef a(:\nend\n");
  EXPECT_FALSE(r.program.has_value());
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].code, "SyntaxError");
  EXPECT_EQ(r.diagnostics[0].loc.line, 2);
  EXPECT_NE(r.diagnostics[0].ToString("x.lne").find("x.lne:2:"), std::string::npos);
}

TEST(DslTest, PrettyPrintRoundTrips) {
  for (const char* file : {"dmp.lne", "bbm1.lne", "ts.lne", "cdffjs.lne", "dfm_ext3.lne"}) {
    SourceProgram p = MustParse(testing::BenchmarkSource(file));
    std::string once = PrettyPrint(p);
    SourceProgram q = MustParse(once);
    EXPECT_EQ(PrettyPrint(q), once) << file;
  }
}

TEST(DslTest, StrategyVariablesListsEveryConstructedStrategy) {
  SourceProgram p = MustParse(kDmpSource);
  auto vars = StrategyVariables(p);
  ASSERT_EQ(vars.size(), 5u);
  EXPECT_EQ(vars[0].first, "i");
  EXPECT_EQ(vars[0].second, BasicType::Strategy(1));
  EXPECT_EQ(vars[1].second, BasicType::Strategy(2));
}

TEST(DslTest, AstDumpIsDeterministicJson) {
  SourceProgram p = MustParse(kDmpSource);
  std::string a = DumpAstJson(p);
  EXPECT_EQ(a, DumpAstJson(MustParse(kDmpSource)));
  EXPECT_NE(a.find("\"algorithm\""), std::string::npos);
}

TEST(DslTest, UserBlockDeclarations) {
  SourceProgram p = MustParse(testing::BenchmarkSource("dfm_ext3.lne"));
  EXPECT_EQ(p.player_count, 3);
  const BlockDecl* b = FindUserBlock(p, "TwoPlayerDFM");
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->outputs.size(), 2u);
  EXPECT_EQ(b->realize, Realize::kNash);
  EXPECT_TRUE(p.options.auto_return_optimal_mixing);
}

}  // namespace
}  // namespace legone
