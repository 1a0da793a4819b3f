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

#include "legone/solver.h"

#include <cmath>

#include <gtest/gtest.h>

#include "legone/lp.h"
#include "legone/pipeline.h"
#include "test_util.h"

namespace legone {
namespace {

OptimizationProblem Manual(const std::string& objective, const std::string& constraints,
                           double hi = 1) {
  nlohmann::json spec{{"name", "t"},
                      {"variables", {{{"name", "a"}, {"lo", 0}, {"hi", hi}},
                                     {{"name", "b"}, {"lo", 0}, {"hi", hi}}}},
                      {"objective", objective},
                      {"constraints", constraints}};
  return ManualProblem(spec);
}

TEST(LpTest, SmallMaximization) {
  LpProblem lp;
  int x = lp.AddVariable(0, 4, 3);
  int y = lp.AddVariable(0, kInf, 2);
  lp.AddRow({{x, 1}, {y, 1}}, -kInf, 4);
  lp.AddRow({{x, 1}, {y, 3}}, -kInf, 6);
  LpResult r = SolveLp(lp);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 12, 1e-9);
  EXPECT_NEAR(r.x[x], 4, 1e-9);
}

TEST(LpTest, InfeasibleAndUnbounded) {
  LpProblem lp;
  int x = lp.AddVariable(0, 1, 1);
  lp.AddRow({{x, 1}}, 2, kInf);
  EXPECT_EQ(SolveLp(lp).status, LpStatus::kInfeasible);
  LpProblem open;
  open.AddVariable(0, kInf, 1);
  EXPECT_EQ(SolveLp(open).status, LpStatus::kUnbounded);
}

TEST(SolverConfigTest, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.restarts = 0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c.restarts = 4;
  c.tolerance = 0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c.tolerance = 1e-7;
  c.time_limit_seconds = -1;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST(SolveBuiltinTest, BoxMaximum) {
  BoundCertificate c = SolveBuiltin(Manual("a", "b <= 1"));
  EXPECT_TRUE(c.valid);
  EXPECT_DOUBLE_EQ(c.bound, 1.0);
  EXPECT_EQ(c.BoundString(), "1.00000");
}

TEST(SolveBuiltinTest, NonlinearConstraint) {
  BoundCertificate c = SolveBuiltin(Manual("a + b", "a * b <= 1/4 and b <= a"));
  EXPECT_NEAR(c.bound, 1.25, 1e-5);
}

TEST(SolveBuiltinTest, InfeasibleDisjunctIsVacuous) {
  BoundCertificate c = SolveBuiltin(Manual("a", "a >= 1/2 and a <= 1/4"));
  EXPECT_TRUE(std::isinf(c.bound));
  EXPECT_LT(c.bound, 0);
  EXPECT_EQ(c.BoundString(), "-inf");
}

TEST(SolveBuiltinTest, Dmp) {
  CompiledProgram cp = CompileSource(testing::kDmpSource, "dmp");
  BoundCertificate c = SolveBuiltin(cp.problem);
  EXPECT_NEAR(c.bound, 0.5, 1e-4);
  EXPECT_FALSE(c.delta_flag);
  EXPECT_EQ(c.per_disjunct.size(), cp.problem.disjuncts.size());
  ASSERT_GE(c.best_disjunct, 0);
  const SolveResult& best = c.per_disjunct[c.best_disjunct];
  EXPECT_LE(MaxViolation(cp.problem, c.best_disjunct, best.point), 1e-6);
  EXPECT_NEAR(ObjectiveValue(cp.problem, c.best_disjunct, best.point), c.bound, 1e-9);
}

TEST(SolveBuiltinTest, ManualKps) {
  OptimizationProblem p =
      ManualProblem(nlohmann::json::parse(testing::BenchmarkSource("kps_manual.json")));
  EXPECT_NEAR(SolveBuiltin(p).bound, 0.75, 1e-4);
}

TEST(SolveBuiltinTest, DeterministicForAFixedSeed) {
  OptimizationProblem p = Manual("a + b", "a * b <= 1/4 and b <= a");
  SolverConfig cfg;
  cfg.seed = 99;
  BoundCertificate x = SolveBuiltin(p, cfg), y = SolveBuiltin(p, cfg);
  nlohmann::json jx = CertificateToJson(x), jy = CertificateToJson(y);
  jx.erase("seconds");
  jy.erase("seconds");
  EXPECT_EQ(jx, jy);
}

TEST(SolveBuiltinTest, CertificateJsonRoundTrip) {
  BoundCertificate c = SolveBuiltin(Manual("a", "a <= b"));
  BoundCertificate back = CertificateFromJson(CertificateToJson(c));
  EXPECT_EQ(back.bound, c.bound);
  EXPECT_EQ(back.per_disjunct.size(), c.per_disjunct.size());
  EXPECT_EQ(back.per_disjunct[0].status, c.per_disjunct[0].status);
}

TEST(SolveBuiltinTest, TimeLimitThrows) {
  CompiledProgram cp = CompileSource(testing::BenchmarkSource("ts.lne"), "ts");
  SolverConfig cfg;
  cfg.time_limit_seconds = 1e-9;
  try {
    SolveBuiltin(cp.problem, cfg);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), "Timeout");
  }
}

TEST(StatusTest, NamesRoundTrip) {
  for (auto s : {SolveStatus::kConverged, SolveStatus::kBoxBoundaryHit, SolveStatus::kInfeasible,
                 SolveStatus::kFailed}) {
    EXPECT_EQ(ParseSolveStatus(SolveStatusName(s)), s);
  }
  EXPECT_FALSE(ParseSolveStatus("nope").has_value());
}

TEST(ExportTest, WolframScriptHasOneCallPerDisjunct) {
  CompiledProgram cp = CompileSource(testing::kDmpSource, "dmp");
  std::string s = ExportScript(cp.problem, ExportDialect::kWolframNMaximize);
  std::size_t calls = 0;
  for (std::size_t pos = s.find("NMaximize["); pos != std::string::npos;
       pos = s.find("NMaximize[", pos + 1)) {
    ++calls;
  }
  EXPECT_EQ(calls, cp.problem.disjuncts.size());
  EXPECT_NE(s.find("Max["), std::string::npos);
  EXPECT_NE(s.find("WorkingPrecision -> 20"), std::string::npos);
}

TEST(ExportTest, UnsplitMinMaxStaysSymbolic) {
  BuildOptions opts;
  opts.split_minmax = false;
  CompiledProgram cp = CompileSource(testing::BenchmarkSource("ts.lne"), "ts", opts);
  std::string s = ExportScript(cp.problem, ExportDialect::kWolframNMaximize);
  EXPECT_NE(s.find("Min["), std::string::npos);
}

TEST(ExportTest, GenericJsonMirrorsProblemDump) {
  CompiledProgram cp = CompileSource(testing::kDmpSource, "dmp");
  EXPECT_EQ(nlohmann::json::parse(ExportScript(cp.problem, ExportDialect::kGenericJson)),
            ProblemToJson(cp.problem));
  EXPECT_EQ(ParseExportDialect("wolfram"), ExportDialect::kWolframNMaximize);
  EXPECT_FALSE(ParseExportDialect("latex").has_value());
}

TEST(ExportTest, EmptyProblemIsUnsupported) {
  OptimizationProblem empty;
  try {
    ExportScript(empty, ExportDialect::kWolframNMaximize);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), "UnsupportedExpression");
  }
}

TEST(CrossCheckTest, DmpIsSound) {
  CompiledProgram cp = CompileSource(testing::kDmpSource, "dmp");
  BoundCertificate c = SolveBuiltin(cp.problem);
  CrossCheckReport r = CrossCheck(cp.problem, c, 20000, 5);
  EXPECT_GT(r.accepted, 0u);
  EXPECT_TRUE(r.sound());
  EXPECT_LE(r.max_found, c.bound + 1e-6);
  EXPECT_NO_THROW(RequireSound(r, cp.problem));
}

TEST(CrossCheckTest, LoweredBoundIsCaught) {
  CompiledProgram cp = CompileSource(testing::kDmpSource, "dmp");
  BoundCertificate c = SolveBuiltin(cp.problem);
  c.bound = 0.4;
  CrossCheckReport r = CrossCheck(cp.problem, c, 20000, 5);
  EXPECT_FALSE(r.sound());
  EXPECT_GT(r.max_found, 0.45);
  ASSERT_GE(r.witness_disjunct, 0);
  EXPECT_LE(MaxViolation(cp.problem, r.witness_disjunct, r.witness), 1e-6);
  try {
    RequireSound(r, cp.problem);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), "SoundnessViolation");
  }
}

TEST(CrossCheckTest, InfeasibleProblemIsVacuous) {
  OptimizationProblem p = Manual("a", "a >= 1/2 and a <= 1/4");
  CrossCheckReport r = CrossCheck(p, SolveBuiltin(p), 2000);
  EXPECT_TRUE(r.vacuous());
  EXPECT_TRUE(r.sound());
}

}  // namespace
}  // namespace legone
