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

#include "legone/logic.h"

#include <stdexcept>

#include <gtest/gtest.h>

#include "legone/dsl.h"
#include "legone/eval.h"
#include "legone/json_io.h"
#include "legone/rational.h"

namespace legone {
namespace {

TEST(RationalTest, ArithmeticStaysReduced) {
  Rational a(2, 4);
  EXPECT_EQ(a.num(), 1);
  EXPECT_EQ(a.den(), 2);
  EXPECT_EQ(a + Rational(1, 3), Rational(5, 6));
  EXPECT_EQ(a * Rational(-2), Rational(-1));
  EXPECT_EQ(Rational(1) / Rational(-3), Rational(-1, 3));
  EXPECT_EQ(Rational(-1, 3).den(), 3);
  EXPECT_TRUE(Rational(1, 3) < Rational(1, 2));
  EXPECT_EQ(Rational(3, 4).ToString(), "3/4");
}

TEST(RationalTest, ParsesDecimalsAndFractions) {
  EXPECT_EQ(Rational::Parse("0.25"), Rational(1, 4));
  EXPECT_EQ(Rational::Parse("-.5"), Rational(-1, 2));
  EXPECT_EQ(Rational::Parse("1/3"), Rational(1, 3));
  EXPECT_THROW(Rational::Parse("x"), std::invalid_argument);
  EXPECT_THROW(Rational(1, 0), std::exception);
}

TEST(RationalTest, OverflowThrows) {
  Rational big(INT64_MAX);
  EXPECT_THROW(big * Rational(2), std::overflow_error);
}

TEST(PayoffExprTest, CombinationRange) {
  PayoffExpr u = PayoffExpr::Combination({{1, Rational(1)}, {2, Rational(-1)}});
  auto [lo, hi] = u.Range();
  EXPECT_EQ(lo, Rational(-1));
  EXPECT_EQ(hi, Rational(1));
  EXPECT_FALSE(u.IsBase());
  EXPECT_TRUE(PayoffExpr::Base(2).IsBase());
}

TEST(TermTest, KeysIdentifyTerms) {
  Term a = Term::PayoffApp(PayoffExpr::Base(1), {"i", "j"});
  Term b = Term::PayoffApp(PayoffExpr::Base(1), {"i", "j"});
  Term c = Term::PayoffApp(PayoffExpr::Base(1), {"j", "i"});
  EXPECT_EQ(a.Key(), b.Key());
  EXPECT_NE(a.Key(), c.Key());
  Term m = Term::MaxPayoff(1, PayoffExpr::Base(1), {"i", "j"});
  EXPECT_EQ(m.args[0], kBoundSlot);
  EXPECT_EQ(m.ToString(), "max u1(*, j)");
}

TEST(ExprTest, ParseEvaluateAndPrint) {
  Expr e = ParseExprText("a + 1/2 * b - max(a, b)");
  std::map<std::string, double> env{{"a", 0.2}, {"b", 0.6}};
  EXPECT_NEAR(EvaluateExpr(e, env), 0.2 + 0.3 - 0.6, 1e-12);
  EXPECT_TRUE(ContainsMinMax(e));
  Expr again = ParseExprText(ExprToString(e));
  EXPECT_NEAR(EvaluateExpr(again, env), EvaluateExpr(e, env), 1e-12);
}

TEST(ExprTest, ConstantsFold) {
  auto v = ConstValue(MakeAdd(MakeConst(Rational(1, 2)), MakeConst(Rational(1, 3))));
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(*v, Rational(5, 6));
  EXPECT_FALSE(ConstValue(MakeVar("a")).has_value());
}

TEST(ExprTest, JsonRoundTrip) {
  Expr e = ParseExprText("min(a, 1 - b) / (2 + c)");
  Expr back = ExprFromJson(ExprToJson(e));
  EXPECT_TRUE(ExprEqual(e, back));
}

TEST(ExprTest, ExpandLinearSplitsCombinations) {
  PayoffExpr u = PayoffExpr::Combination({{1, Rational(1)}, {2, Rational(-1)}});
  Expr e = MakeTerm(Term::PayoffApp(u, {"x", "y"}));
  Expr expanded = ExpandLinear(e);
  int payoffs = 0;
  VisitTerms(expanded, [&](const Term& t) {
    if (t.kind == TermKind::kPayoff) {
      ++payoffs;
      EXPECT_TRUE(t.payoff.IsBase());
    }
  });
  EXPECT_EQ(payoffs, 2);
}

TEST(CompiledExprTest, GradientFollowsActiveBranch) {
  Expr e = ParseExprText("max(a * b, a + b)");
  auto idx = [](const std::string& n) { return n == "a" ? 0 : n == "b" ? 1 : -1; };
  CompiledExpr c = CompiledExpr::Compile(e, idx);
  std::vector<double> g;
  double v = c.ValueAndGradient({0.5, 0.25}, 2, g);
  EXPECT_NEAR(v, 0.75, 1e-12);
  EXPECT_NEAR(g[0], 1, 1e-12);
  EXPECT_NEAR(g[1], 1, 1e-12);
  v = c.ValueAndGradient({3, 4}, 2, g);
  EXPECT_NEAR(v, 12, 1e-12);
  EXPECT_NEAR(g[0], 4, 1e-12);
  EXPECT_NEAR(g[1], 3, 1e-12);
}

TEST(AffineTest, DetectsAffineForms) {
  auto idx = [](const std::string& n) { return n == "a" ? 0 : n == "b" ? 1 : -1; };
  auto f = ExtractAffine(ParseExprText("2 * a - b / 4 + 1"), idx);
  ASSERT_TRUE(f.has_value());
  EXPECT_DOUBLE_EQ(f->coefs.at(0), 2);
  EXPECT_DOUBLE_EQ(f->coefs.at(1), -0.25);
  EXPECT_DOUBLE_EQ(f->constant, 1);
  EXPECT_FALSE(ExtractAffine(ParseExprText("a * b"), idx).has_value());
}

TEST(FormulaTest, SubstitutionRenamesStrategies) {
  AtomicProperty a;
  a.body.push_back({MakeTerm(Term::PayoffApp(PayoffExpr::Base(1), {"z", "j"})), CmpOp::kLe,
                    MakeTerm(Term::PayoffApp(PayoffExpr::Base(1), {"k", "j"})), {}});
  Substitution s;
  s.strategies["z"] = "i";
  AtomicProperty b = SubstituteAtom(a, s);
  EXPECT_EQ(ComparisonToString(b.body[0]), "u1(i, j) <= u1(k, j)");
}

TEST(FormulaTest, FlattenAndCount) {
  AtomicProperty a;
  a.body.push_back({MakeVar("x"), CmpOp::kLe, MakeVar("y"), {}});
  Formula f = MakeAnd({MakeAnd({MakeAtom(a), MakeAtom(a)}), MakeOr({MakeAtom(a)}), MakeTrue()});
  Formula g = Flatten(f);
  EXPECT_EQ(CountAtoms(g), 3u);
  EXPECT_EQ(g->kind, FormulaKind::kAnd);
  for (const auto& k : g->kids) EXPECT_NE(k->kind, FormulaKind::kAnd);
}

TEST(FormulaTest, TextParsingAndJson) {
  Formula f = ParseFormulaText("a <= b + delta and (c >= 1/2 or c = 0)");
  EXPECT_EQ(CountAtoms(f), 3u);
  nlohmann::json j = FormulaToJson(f);
  EXPECT_TRUE(j.is_object());
  EXPECT_EQ(FormulaToJson(ParseFormulaText("a <= b + delta and (c >= 1/2 or c = 0)")), j);
  EXPECT_THROW(ParseFormulaText("a <= and"), std::invalid_argument);
}

TEST(ComparisonTest, HoldsWithTolerance) {
  Comparison c{MakeVar("a"), CmpOp::kLe, MakeVar("b"), {}};
  EXPECT_TRUE(ComparisonHolds(c, 0.5, 0.5, 0));
  EXPECT_TRUE(ComparisonHolds(c, 0.5 + 1e-10, 0.5, 1e-9));
  EXPECT_FALSE(ComparisonHolds(c, 0.6, 0.5, 1e-9));
  Comparison e{MakeVar("a"), CmpOp::kEq, MakeVar("b"), {}};
  EXPECT_FALSE(ComparisonHolds(e, 0.4, 0.5, 1e-9));
}

}  // namespace
}  // namespace legone
