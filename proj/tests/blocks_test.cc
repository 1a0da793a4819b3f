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

#include "legone/blocks.h"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "legone/encode.h"
#include "legone/eval.h"
#include "test_util.h"

namespace legone {
namespace {

using testing::MustParse;

std::string Text(const Formula& f) { return FormulaToString(f); }

TEST(LibraryNameTest, DecodesPlayerIndices) {
  auto z = ParseLibraryName("ZeroSumNE12");
  ASSERT_TRUE(z.has_value());
  EXPECT_EQ(z->kind, LibraryKind::kZeroSumNE);
  EXPECT_EQ(z->i, 1);
  EXPECT_EQ(z->j, 2);
  auto br = ParseLibraryName("BestResponse3");
  ASSERT_TRUE(br.has_value());
  EXPECT_EQ(br->kind, LibraryKind::kBestResponse);
  EXPECT_EQ(br->i, 3);
  EXPECT_FALSE(ParseLibraryName("Whatever1").has_value());
}

TEST(SignatureTest, BestResponseTakesOpponents) {
  auto ref = *ParseLibraryName("BestResponse2");
  SignatureCheck ok = LibrarySignature(ref, 3, {BasicType::Strategy(1), BasicType::Strategy(3)});
  ASSERT_TRUE(ok.signature.has_value());
  EXPECT_EQ(ok.signature->outputs, std::vector<BasicType>{BasicType::Strategy(2)});
  SignatureCheck two = LibrarySignature(ref, 2, {BasicType::Strategy(2)});
  ASSERT_TRUE(two.signature.has_value());
  EXPECT_EQ(two.signature->inputs, std::vector<BasicType>{BasicType::Strategy(1)});
}

TEST(InherentTest, FourFamiliesPerPlayer) {
  EXPECT_EQ(CountAtoms(InherentFormulas(2)), 8u);
  EXPECT_EQ(CountAtoms(InherentFormulas(3)), 12u);
}

TEST(EncodingTest, BestResponse) {
  Formula f = BestResponseEncoding(2, 1, {"j"}, "out");
  ASSERT_EQ(CountAtoms(f), 1u);
  std::string s = Text(f);
  EXPECT_NE(s.find("u1(out, j)"), std::string::npos) << s;
  VisitAtoms(f, [](const AtomicProperty& a) {
    ASSERT_EQ(a.forall_strategies.size(), 1u);
    EXPECT_EQ(a.forall_strategies[0].player, 1);
  });
  Formula g = BestResponseEncoding(3, 2, {"a", "c"}, "b");
  std::string t = Text(g);
  EXPECT_NE(t.find("u2(a, b, c)"), std::string::npos) << t;
}

TEST(EncodingTest, ZeroSumKeepsFixedSlots) {
  PayoffExpr u = PayoffExpr::Combination({{1, Rational(1)}, {2, Rational(-1)}});
  Formula f = ZeroSumNEEncoding(3, 1, 2, {"w"}, u, "x", "y");
  std::size_t atoms = 0;
  VisitAtoms(f, [&](const AtomicProperty& a) {
    ++atoms;
    for (const auto& c : a.body) {
      VisitTerms(c.lhs, [](const Term& t) {
        if (!t.args.empty()) EXPECT_EQ(t.args[2], "w");
      });
    }
  });
  EXPECT_GE(atoms, 2u);
}

TEST(EncodingTest, StationaryPointHasFourConjunctsAndFreshRho) {
  Formula f = StationaryPointEncoding(2, 1, 2, {}, "x", "y", "w", "z", "rho@0", true);
  std::size_t atoms = 0;
  std::size_t rho_binders = 0;
  VisitAtoms(f, [&](const AtomicProperty& a) {
    ++atoms;
    for (const auto& b : a.exists) rho_binders += b.name == "rho@0" ? 1 : 0;
  });
  EXPECT_EQ(atoms, 4u);
  EXPECT_GE(rho_binders, 1u);
  EXPECT_TRUE(MentionsDelta(f));
  EXPECT_FALSE(MentionsDelta(StationaryPointEncoding(2, 1, 2, {}, "x", "y", "w", "z", "r", false)));
}

TEST(EncodingTest, UniformMixingCoefficients) {
  std::string two = Text(UniformMixingEncoding(2, 1, {"i", "k"}, "r1"));
  EXPECT_NE(two.find("1/2"), std::string::npos) << two;
  std::string three = Text(UniformMixingEncoding(2, 1, {"a", "b", "c"}, "m"));
  EXPECT_NE(three.find("1/3"), std::string::npos) << three;
}

TEST(EncodingTest, MixRejectsLambdaOutsideUnitInterval) {
  EXPECT_NO_THROW(MixEncoding(2, 1, "a", "b", Rational(1, 4), "m"));
  EXPECT_THROW(MixEncoding(2, 1, "a", "b", Rational(5, 4), "m"), BlockError);
}

TEST(EdgeBoundTest, DocumentedInstances) {
  EXPECT_NEAR(EdgeBoundValue({0.6, 0.0}, {0.0, 0.6}), 0.3, 1e-12);
  EXPECT_NEAR(EdgeBoundValue({0.2, 0.1}, {0.5, 0.4}), 0.2, 1e-12);
}

double GridMinimum(const std::vector<double>& a, const std::vector<double>& b) {
  double best = 1e300;
  for (int s = 0; s <= 10000; ++s) {
    double l = s * 1e-4, m = -1e300;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, a[k] * (1 - l) + b[k] * l);
    best = std::min(best, m);
  }
  return best;
}

TEST(EdgeBoundTest, MatchesGridSearch) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t r = 2 + trial % 2;
    std::vector<double> a(r), b(r);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    ASSERT_NEAR(EdgeBoundValue(a, b), GridMinimum(a, b), 1e-3) << "trial " << trial;
  }
}

TEST(EdgeBoundTest, SymbolicFormAgreesWithNumeric) {
  std::vector<Expr> a{MakeVar("a1"), MakeVar("a2")}, b{MakeVar("b1"), MakeVar("b2")};
  Expr e = EdgeBound(a, b);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    std::map<std::string, double> env{{"a1", u(rng)}, {"a2", u(rng)}, {"b1", u(rng)}, {"b2", u(rng)}};
    EXPECT_NEAR(EvaluateExpr(e, env),
                EdgeBoundValue({env["a1"], env["a2"]}, {env["b1"], env["b2"]}), 1e-9);
  }
}

TEST(PolytopeTest, EnumeratesGridEdges) {
  EdgeBoundSpec s = EnumerateMixingPolytope({2, 2});
  EXPECT_EQ(s.vertices.size(), 4u);
  EXPECT_EQ(s.edges.size(), 4u);
  for (const auto& e : s.edges) {
    int differing = 0;
    for (std::size_t k = 0; k < 2; ++k) differing += s.vertices[e.from][k] != s.vertices[e.to][k];
    EXPECT_EQ(differing, 1);
    EXPECT_GE(e.player, 1);
  }
  EXPECT_EQ(EnumerateMixingPolytope({1, 1}).edges.size(), 0u);
  EXPECT_THROW(EnumerateMixingPolytope({64, 64, 64}), BlockError);
}

TEST(OptimalMixingTest, SingleProfileIsMaxRegret) {
  Expr e = OptimalMixingBound(2, {{"i"}, {"j"}});
  std::string s = ExprToString(e);
  EXPECT_NE(s.find("max"), std::string::npos) << s;
}

TEST(AutoReturnTest, AppendsOptimalMixing) {
  SourceProgram p = MustParse(
      "players 2\noption auto_return\ndef a():\n  i = Random1()\n  j = BestResponse2(i)\n"
      "  k = BestResponse1(j)\nend\n");
  SourceProgram q = AutoReturn(p);
  ASSERT_TRUE(q.algorithm.return_profile.has_value());
  const Statement& last = q.algorithm.statements.back();
  EXPECT_EQ(last.block.rfind("OptimalMixing", 0), 0u);
  EXPECT_EQ(last.args.size(), 3u);
}

TEST(AutoReturnTest, PassThroughAndMissingPlayer) {
  SourceProgram p = MustParse(testing::kDmpSource);
  EXPECT_EQ(PrettyPrint(AutoReturn(p)), PrettyPrint(p));
  SourceProgram three = MustParse(
      "players 3\noption auto_return\ndef a():\n  i = Random1()\n  j = Random2()\nend\n");
  try {
    AutoReturn(three);
    FAIL() << "expected NoStrategyForPlayer";
  } catch (const BlockError& e) {
    EXPECT_EQ(e.kind(), "NoStrategyForPlayer");
  }
}

TEST(ManifestTest, ListsEveryFamily) {
  nlohmann::json m = nlohmann::json::parse(BlockManifestJson(2));
  std::set<std::string> names;
  for (const auto& b : m.at("blocks")) names.insert(b.at("name").get<std::string>());
  for (const char* n : {"Random1", "BestResponse2", "ZeroSumNE12", "StationaryPoint12",
                        "UniformMixing1", "Mix2", "OptimalMixing"}) {
    EXPECT_TRUE(names.count(n)) << n;
  }
}

}  // namespace
}  // namespace legone
