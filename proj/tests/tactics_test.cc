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

#include "legone/tactics.h"

#include <set>

#include <gtest/gtest.h>

#include "legone/blocks.h"
#include "legone/encode.h"
#include "test_util.h"

namespace legone {
namespace {

using testing::kDmpSource;
using testing::MustParse;

std::vector<PayoffExpr> BasePayoffs() { return {PayoffExpr::Base(1), PayoffExpr::Base(2)}; }

std::set<std::string> ComparisonTexts(const Formula& f) {
  std::set<std::string> out;
  VisitAtoms(f, [&](const AtomicProperty& a) {
    for (const auto& c : a.body) out.insert(ComparisonToString(c));
  });
  return out;
}

TEST(EncodeTest, DmpStructure) {
  EncodedProgram enc = EncodeProgram(MustParse(kDmpSource));
  EXPECT_EQ(enc.player_count, 2);
  ASSERT_EQ(enc.parts.size(), 6u);
  EXPECT_EQ(CountAtoms(enc.parts[0]), 8u);
  EXPECT_EQ(CountAtoms(enc.parts[1]), 0u);  // Random carries no property
  EXPECT_EQ(enc.goal.profile, (std::vector<std::string>{"r1", "r2"}));
  EXPECT_EQ(enc.universe[0], (std::vector<std::string>{"i", "k", "r1"}));
  EXPECT_EQ(enc.universe[1], (std::vector<std::string>{"j", "r2"}));
  EXPECT_FALSE(enc.delta_flag);
  std::string goal = ExprToString(enc.goal.objective);
  EXPECT_NE(goal.find("max"), std::string::npos) << goal;
}

TEST(EncodeTest, MissingReturnWithoutAutoReturn) {
  SourceProgram p = MustParse("players 2\ndef a():\n  i = Random1()\n  j = Random2()\nend\n");
  try {
    EncodeProgram(p);
    FAIL();
  } catch (const EncodeError& e) {
    EXPECT_EQ(e.kind(), "MissingReturn");
  }
}

TEST(EncodeTest, ReturningRandomStrategiesLeavesOnlyInherentFormulas) {
  EncodedProgram enc = EncodeProgram(
      MustParse("players 2\ndef a():\n  i = Random1()\n  j = Random2()\n  return i, j\nend\n"));
  std::size_t statement_atoms = 0;
  for (std::size_t k = 1; k < enc.parts.size(); ++k) statement_atoms += CountAtoms(enc.parts[k]);
  EXPECT_EQ(statement_atoms, 0u);
}

TEST(EncodeTest, StationaryPointsGetDistinctRho) {
  SourceProgram p = MustParse(
      "players 2\noption auto_return\ndef a():\n  x, y, w, z = StationaryPoint12()\n"
      "  p, q, s, t = StationaryPoint12()\nend\n");
  std::set<std::string> rhos;
  EncodedProgram enc = EncodeProgram(p);
  VisitAtoms(enc.phi, [&](const AtomicProperty& a) {
    for (const auto& b : a.exists) rhos.insert(b.name);
  });
  EXPECT_EQ(rhos.size(), 2u);
  EXPECT_TRUE(enc.delta_flag);
}

TEST(EncodeTest, BlackBoxGuaranteeAppearsInThreePlayerExtension) {
  EncodedProgram enc = EncodeProgram(MustParse(testing::BenchmarkSource("dfm_ext3.lne")));
  EXPECT_EQ(enc.player_count, 3);
  EXPECT_TRUE(enc.delta_flag);
  bool found = false;
  VisitAtoms(enc.phi, [&](const AtomicProperty& a) {
    if (a.origin.block == "TwoPlayerDFM") found = true;
  });
  EXPECT_TRUE(found);
}

TEST(InstantiateTest, SubstitutesEveryStrategyOfTheUniverse) {
  Formula br = BestResponseEncoding(2, 1, {"j"}, "k");
  InstantiationStats stats;
  Formula out = InstantiateFormula(br, {{"i", "k", "r1"}, {"j"}}, BasePayoffs(), &stats);
  std::set<std::string> texts = ComparisonTexts(out);
  EXPECT_TRUE(texts.count("u1(i, j) <= u1(k, j)"));
  EXPECT_TRUE(texts.count("u1(k, j) <= u1(k, j)"));
  EXPECT_TRUE(texts.count("u1(r1, j) <= u1(k, j)"));
  EXPECT_EQ(stats.procedure1, 3u);
  EXPECT_EQ(stats.procedure2, 1u);
  bool max_form = false;
  for (const auto& t : texts) max_form = max_form || t == "max u1(*, j) <= u1(k, j)";
  EXPECT_TRUE(max_form);
}

TEST(InstantiateTest, ResultIsQuantifierFree) {
  EncodedProgram enc = EncodeProgram(MustParse(kDmpSource));
  Formula out = InstantiateFormula(enc.phi, enc.universe, enc.payoff_set);
  VisitAtoms(out, [](const AtomicProperty& a) { EXPECT_TRUE(a.IsQuantifierFree()); });
}

TEST(InstantiateTest, RepeatedQuantifiedVariableSkipsMaxForm) {
  AtomicProperty a;
  a.forall_strategies.push_back({1, "$z"});
  a.body.push_back({MakeTerm(Term::PayoffApp(PayoffExpr::Base(1), {"$z", "j"})), CmpOp::kLe,
                    MakeTerm(Term::PayoffApp(PayoffExpr::Base(2), {"$z", "j"})), {}});
  InstantiationStats stats;
  Instantiate(a, {{"i"}, {"j"}}, BasePayoffs(), &stats);
  EXPECT_EQ(stats.procedure2, 0u);
  EXPECT_EQ(stats.procedure1, 1u);
}

TEST(ForgetTest, EqualTermsShareOneVariable) {
  Expr t1 = MakeTerm(Term::PayoffApp(PayoffExpr::Base(1), {"i", "j"}));
  Expr t2 = MakeTerm(Term::PayoffApp(PayoffExpr::Base(1), {"k", "j"}));
  Expr t3 = MakeTerm(Term::MaxPayoff(1, PayoffExpr::Base(1), {"x", "j"}));
  AtomicProperty a;
  a.body.push_back({t1, CmpOp::kLe, t2, {}});
  a.body.push_back({t2, CmpOp::kLe, t3, {}});
  a.body.push_back({t1, CmpOp::kGe, MakeConst(0), {}});
  ForgetOptions opts;
  AbstractSystem sys = Forget(MakeAtom(a), t3, opts);
  EXPECT_EQ(sys.variables.size(), 3u);
  for (const auto& v : sys.variables) {
    EXPECT_EQ(v.lo, Rational(0));
    EXPECT_EQ(v.hi, Rational(1));
  }
}

TEST(ForgetTest, CombinationPayoffsGetTheirRange) {
  PayoffExpr diff = PayoffExpr::Combination({{1, Rational(1)}, {2, Rational(-1)}});
  Expr t = MakeTerm(Term::MaxPayoff(1, diff, {"x", "j"}));
  AtomicProperty a;
  a.body.push_back({t, CmpOp::kGe, MakeConst(0), {}});
  AbstractSystem sys = Forget(MakeAtom(a), t, {});
  ASSERT_EQ(sys.variables.size(), 1u);
  EXPECT_EQ(sys.variables[0].lo, Rational(-1));
  EXPECT_EQ(sys.variables[0].hi, Rational(1));
}

TEST(AbstractTest, DmpSystemIsDeterministic) {
  EncodedProgram enc = EncodeProgram(MustParse(kDmpSource));
  InstantiationStats s1, s2;
  AbstractSystem a = Abstract(enc, &s1);
  AbstractSystem b = Abstract(enc, &s2);
  EXPECT_EQ(AbstractSystemToJson(a), AbstractSystemToJson(b));
  EXPECT_GT(a.variables.size(), 4u);
  EXPECT_GT(s1.procedure1, 0u);
  EXPECT_EQ(a.player_count, 2);
  EXPECT_FALSE(a.delta_flag);
}

}  // namespace
}  // namespace legone
