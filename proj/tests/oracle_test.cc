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

#include "legone/oracle.h"

#include <gtest/gtest.h>

#include "test_util.h"

namespace legone {
namespace {

using testing::kDmpSource;
using testing::MustParse;

ConcreteGame MatchingPennies() {
  ConcreteGame g;
  g.actions = {2, 2};
  g.payoffs = {{1, 0, 0, 1}, {0, 1, 1, 0}};
  return g;
}

// Prisoner's dilemma rescaled to [0,1]; (defect, defect) is the unique NE.
ConcreteGame Dilemma() {
  ConcreteGame g;
  g.actions = {2, 2};
  g.payoffs = {{2.0 / 3, 0, 1, 1.0 / 3}, {2.0 / 3, 1, 0, 1.0 / 3}};
  return g;
}

TEST(GameTest, PayoffIndexingAndJson) {
  ConcreteGame g = MatchingPennies();
  EXPECT_EQ(g.ProfileCount(), 4u);
  EXPECT_DOUBLE_EQ(g.Payoff(1, {0, 0}), 1);
  EXPECT_DOUBLE_EQ(g.Payoff(2, {0, 1}), 1);
  ConcreteGame back = GameFromJson(GameToJson(g));
  EXPECT_EQ(back.actions, g.actions);
  EXPECT_EQ(back.payoffs, g.payoffs);
}

TEST(GameTest, RejectsMalformedGames) {
  nlohmann::json j = GameToJson(MatchingPennies());
  j["payoffs"][0][0] = 1.5;
  EXPECT_THROW(GameFromJson(j), OracleError);
  j = GameToJson(MatchingPennies());
  j["actions"] = {2, 3};
  EXPECT_THROW(GameFromJson(j), OracleError);
}

TEST(RegretTest, MatchingPennies) {
  ConcreteGame g = MatchingPennies();
  std::vector<MixedStrategy> half{{0.5, 0.5}, {0.5, 0.5}};
  EXPECT_NEAR(MaxRegret(g, half), 0, 1e-12);
  std::vector<MixedStrategy> pure{{1, 0}, {1, 0}};
  EXPECT_NEAR(Regret(g, 2, pure), 1, 1e-12);
  EXPECT_NEAR(Regret(g, 1, pure), 0, 1e-12);
  EXPECT_NEAR(ExpectedPayoff(g, PayoffExpr::Base(1), half), 0.5, 1e-12);
  EXPECT_NEAR(BestPayoff(g, PayoffExpr::Base(1), 1, {{1, 0}, {0.25, 0.75}}), 0.75, 1e-12);
}

TEST(BimatrixTest, FindsMixedAndPureEquilibria) {
  auto mp = SolveBimatrix({{1, 0}, {0, 1}}, {{0, 1}, {1, 0}});
  ASSERT_TRUE(mp.has_value());
  EXPECT_NEAR(mp->first[0], 0.5, 1e-9);
  EXPECT_NEAR(mp->second[0], 0.5, 1e-9);
  ConcreteGame pd = Dilemma();
  auto ne = SolveBimatrix({{2.0 / 3, 0}, {1, 1.0 / 3}}, {{2.0 / 3, 1}, {0, 1.0 / 3}});
  ASSERT_TRUE(ne.has_value());
  EXPECT_NEAR(MaxRegret(pd, {ne->first, ne->second}), 0, 1e-9);
}

TEST(RunConcreteTest, DmpOnMatchingPennies) {
  Trace t = RunConcrete(MustParse(kDmpSource), MatchingPennies(), 3);
  EXPECT_FALSE(t.partial);
  ASSERT_EQ(t.regrets.size(), 2u);
  EXPECT_LE(t.MaxRegret(), 0.5 + 1e-12);
  EXPECT_EQ(t.profile, (std::vector<std::string>{"r1", "r2"}));
  EXPECT_EQ(t.steps.size(), 5u);
  EXPECT_TRUE(TraceToJson(t).contains("regrets"));
}

TEST(RunConcreteTest, BestResponsePairAtPureEquilibrium) {
  SourceProgram p = MustParse(
      "players 2\ndef a():\n  i = Random1()\n  j = BestResponse2(i)\n  k = BestResponse1(j)\n"
      "  l = BestResponse2(k)\n  return k, l\nend\n");
  Trace t = RunConcrete(p, Dilemma(), 1);
  EXPECT_NEAR(t.MaxRegret(), 0, 1e-12);
}

TEST(RunConcreteTest, UniformMixingOfAStrategyWithItself) {
  SourceProgram p = MustParse(
      "players 2\ndef a():\n  i = Random1()\n  j = Random2()\n  m = UniformMixing1(i, i)\n"
      "  return m, j\nend\n");
  std::mt19937_64 rng(4);
  Trace t = RunConcrete(p, ConcreteGame::Uniform({4, 3}, rng), 9);
  ASSERT_EQ(t.strategies.at("m").size(), 4u);
  for (std::size_t a = 0; a < 4; ++a) {
    EXPECT_NEAR(t.strategies.at("m")[a], t.strategies.at("i")[a], 1e-15);
  }
}

TEST(RunConcreteTest, ConstantGameHasZeroRegret) {
  for (const char* file : {"dmp.lne", "bbm1.lne", "ts.lne"}) {
    Trace t = RunConcrete(MustParse(testing::BenchmarkSource(file)),
                          ConcreteGame::Constant({3, 3}, 0), 5);
    EXPECT_NEAR(t.MaxRegret(), 0, 1e-12) << file;
  }
}

TEST(RunConcreteTest, StationaryPointReachesDeltaNum) {
  SourceProgram p = MustParse(testing::BenchmarkSource("ts.lne"));
  std::mt19937_64 rng(12);
  for (int k = 0; k < 5; ++k) {
    Trace t = RunConcrete(p, ConcreteGame::Uniform({3, 3}, rng), k);
    ASSERT_FALSE(t.partial) << t.note;
    bool has_rho = false;
    for (const auto& [name, v] : t.reals) {
      if (name.rfind("rho@", 0) == 0) {
        has_rho = true;
        EXPECT_GE(v, -1e-12);
        EXPECT_LE(v, 1 + 1e-12);
      }
    }
    EXPECT_TRUE(has_rho);
  }
}

TEST(RunConcreteTest, IsDeterministic) {
  std::mt19937_64 rng(2);
  ConcreteGame g = ConcreteGame::Uniform({3, 4}, rng);
  SourceProgram p = MustParse(testing::BenchmarkSource("bbm1.lne"));
  EXPECT_EQ(TraceToJson(RunConcrete(p, g, 8)), TraceToJson(RunConcrete(p, g, 8)));
}

TEST(SamplerTest, CornerGamesComeFirst) {
  GameSampler s(2, 5, 1);
  ConcreteGame zero = s.Next();
  for (double v : zero.payoffs[0]) EXPECT_EQ(v, 0);
  ConcreteGame one = s.Next();
  for (double v : one.payoffs[1]) EXPECT_EQ(v, 1);
  s.Next();
  s.Next();
  for (int k = 0; k < 50; ++k) {
    ConcreteGame g = s.Next();
    for (int a : g.actions) {
      EXPECT_GE(a, 2);
      EXPECT_LE(a, 5);
    }
  }
  EXPECT_EQ(DefaultMaxActions(2), 5);
  EXPECT_EQ(DefaultMaxActions(3), 3);
}

TEST(ValidateEncodingTest, DmpHolds) {
  EncodingReport r = ValidateEncoding(MustParse(kDmpSource), 1000, 21);
  EXPECT_EQ(r.games, 1000u);
  EXPECT_EQ(r.checked, 1000u);
  EXPECT_EQ(r.violation_count, 0u);
  EXPECT_GT(r.atoms_checked, 1000u);
}

TEST(ValidateEncodingTest, JensenAndStationaryConstraintsHold) {
  for (const char* file : {"kps.lne", "ts.lne"}) {
    EncodingReport r = ValidateEncoding(MustParse(testing::BenchmarkSource(file)), 60, 4);
    EXPECT_EQ(r.violation_count, 0u) << file;
    EXPECT_EQ(r.partial, 0u) << file;
  }
}

// Game 809 of this seed stalls the descent away from a delta-stationary point.
TEST(ValidateEncodingTest, StalledDescentFallsBackToEquilibrium) {
  EncodingReport r = ValidateEncoding(MustParse(testing::BenchmarkSource("ts.lne")), 810, 2000);
  EXPECT_EQ(r.violation_count, 0u);
  EXPECT_EQ(r.partial, 0u);
}

TEST(ValidateEncodingTest, WrongEncodingIsCaught) {
  SourceProgram p = MustParse(
      "players 2\n\nblock Liar(x: Strategy1) -> (y: Strategy2) realize nash:\n"
      "  f1(x, y) <= 0\nend\n\ndef a():\n  i = Random1()\n  j = Liar(i)\n"
      "  return i, j\nend\n");
  EncodingReport r = ValidateEncoding(p, 50, 1);
  EXPECT_GT(r.violation_count, 0u);
  ASSERT_FALSE(r.violations.empty());
  EXPECT_GT(r.violations[0].lhs, r.violations[0].rhs);
}

TEST(ValidateBoundTest, DmpNeverExceedsHalf) {
  BoundReport r = ValidateBound(MustParse(kDmpSource), 0.5, false, 2000, 17, 5);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_LE(r.max_regret, 0.5 + 1e-6);
  EXPECT_GT(r.max_regret, 0.3);
}

TEST(ValidateBoundTest, LoweredBoundIsViolated) {
  BoundReport r = ValidateBound(MustParse(kDmpSource), 0.3, false, 2000, 17, 5);
  EXPECT_GT(r.violations, 0u);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_GT(r.witness_regret, 0.3);
  Trace again = RunConcrete(MustParse(kDmpSource), *r.witness, 0);
  EXPECT_GE(again.MaxRegret(), 0);
}

TEST(ValidateBoundTest, DeltaAddsNumericSlack) {
  BoundReport r = ValidateBound(MustParse(kDmpSource), 0.5, true, 10, 1);
  EXPECT_NEAR(r.limit, 0.5 + 1e-3 + 1e-6, 1e-12);
}

}  // namespace
}  // namespace legone
