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

// Acceptance harness. Prints one PASS/FAIL line per criterion, followed by
// indented detail lines, and exits non-zero when any criterion fails.
//
//   acceptance [--only N[,N...]] [--quick]
//
// --quick shrinks sample counts for smoke runs; reported results then do not
// certify the criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "legone/benchmarks.h"
#include "legone/blocks.h"
#include "legone/compiler.h"
#include "legone/discovery.h"
#include "legone/oracle.h"
#include "legone/pipeline.h"
#include "legone/solver.h"
#include "legone/tactics.h"

namespace {

using namespace legone;
namespace fs = std::filesystem;

// Tolerances and sample sizes of the criteria.
constexpr double kBenchTolerance = 1e-4;
constexpr double kBenchSeconds = 100;
constexpr double kVertexCoverTolerance = 1e-6;
constexpr double kEdgeTolerance = 1e-3;
constexpr double kEdgeGridStep = 1e-4;
constexpr int kEdgeInstances = 10000;
constexpr std::size_t kOracleGames = 1000;
constexpr std::size_t kCrossCheckSamples = 100000;
constexpr double kCrossCheckSlack = 1e-6;
constexpr int kDnfAssignments = 1000;
constexpr int kDiscoveryRounds = 12;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void Note(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    details.emplace_back(buf);
  }
  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("failed: " + what);
    }
  }
};

struct Context {
  BenchmarkManifest manifest;
  bool quick = false;
  std::map<std::string, BenchmarkResult> results;  // cached solver runs

  const BenchmarkEntry& Entry(const std::string& id) const {
    for (const auto& e : manifest.entries) {
      if (e.id == id) return e;
    }
    throw std::runtime_error("manifest has no entry " + id);
  }
  const BenchmarkResult& Result(const std::string& id) {
    auto it = results.find(id);
    if (it == results.end()) {
      it = results.emplace(id, RunBenchmark(manifest, Entry(id), SolverConfig{})).first;
    }
    return it->second;
  }
  SourceProgram Program(const std::string& id) const {
    const BenchmarkEntry& e = Entry(id);
    ParseResult r = ParseAndCheck(ReadTextFile((fs::path(manifest.directory) / e.source).string()));
    if (!r.program) throw DiagnosticsError(r.diagnostics);
    return *r.program;
  }
};

void BenchmarkRows(Context& ctx, const std::vector<std::string>& ids, bool manual, Outcome& out) {
  for (const auto& id : ids) {
    const BenchmarkResult& r = ctx.Result(id);
    const bool in_time = r.seconds <= kBenchSeconds;
    const bool label_ok = (r.Label() == "manual encoding") == manual;
    out.Note("%-9s %-16s golden %-10s got %-10s |diff| %.1e  %.1fs%s", id.c_str(),
             r.Label().c_str(), r.entry.golden.text.c_str(),
             r.ran ? r.certificate.BoundString().c_str() : "error",
             r.ran ? std::fabs(r.certificate.bound - r.entry.golden.value) : NAN, r.seconds,
             r.error.empty() ? "" : ("  " + r.error).c_str());
    out.Require(r.pass && r.entry.tolerance <= kBenchTolerance, id + " matches its golden bound");
    out.Require(in_time, id + " finishes within 100 s");
    out.Require(label_ok, id + " is labeled " + (manual ? "manual encoding" : "automatic"));
  }
}

Outcome Criterion1(Context& ctx) {
  Outcome out;
  BenchmarkRows(ctx, {"dmp", "bbm1", "cdffjs", "ts", "dfm", "dfm-ext3"}, false, out);
  return out;
}

Outcome Criterion2(Context& ctx) {
  Outcome out;
  BenchmarkRows(ctx, {"kps", "dmp-0.38", "bbm2"}, true, out);
  return out;
}

Outcome Criterion3(Context&) {
  Outcome out;
  BoundCertificate poly = ExtensionPolymatrix();
  out.Note("polymatrix bound %s", poly.BoundString(7).c_str());
  out.Require(poly.valid && poly.delta_flag && std::fabs(poly.bound - 0.5) <= kBenchTolerance,
              "polymatrix bound is 0.50000+δ");
  VertexCoverResult vc = ExtensionVertexCover(10, 2);
  out.Note("vertex cover optimum %.3e (box [0,10], ratio 2)", vc.certificate.bound);
  out.Require(vc.certificate.valid && std::fabs(vc.certificate.bound) <= kVertexCoverTolerance,
              "vertex cover optimum is 0");
  return out;
}

double GridMinimum(const std::vector<double>& a, const std::vector<double>& b) {
  const int steps = static_cast<int>(std::lround(1 / kEdgeGridStep));
  double best = INFINITY;
  for (int s = 0; s <= steps; ++s) {
    const double l = s * kEdgeGridStep;
    double m = -INFINITY;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, a[k] * (1 - l) + b[k] * l);
    best = std::min(best, m);
  }
  return best;
}

Outcome Criterion4(Context& ctx) {
  Outcome out;
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = ctx.quick ? 1000 : kEdgeInstances;
  double worst = 0;
  int crossings = 0;
  for (int t = 0; t < n; ++t) {
    const std::size_t r = 2 + t % 2;
    std::vector<double> a(r), b(r);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = i + 1; j < r; ++j) crossings += (a[i] - a[j]) * (b[i] - b[j]) < 0;
    }
    worst = std::max(worst, std::fabs(EdgeBoundValue(a, b) - GridMinimum(a, b)));
  }
  out.Note("%d instances (r = 2 and 3), %d crossing pairs, max |closed form - grid| = %.2e", n,
           crossings, worst);
  out.Require(worst <= kEdgeTolerance, "closed form within 1e-3 of the grid minimum");
  return out;
}

std::vector<std::string> ProgramIds(const Context& ctx) {
  std::vector<std::string> ids;
  for (const auto& e : ctx.manifest.entries) {
    if (!e.manual) ids.push_back(e.id);
  }
  return ids;
}

Outcome Criterion5(Context& ctx) {
  Outcome out;
  const std::size_t games = ctx.quick ? 100 : kOracleGames;
  const std::set<std::string> bound_checked{"dmp", "bbm1", "kps-auto"};
  for (const auto& id : ProgramIds(ctx)) {
    SourceProgram prog = ctx.Program(id);
    auto start = std::chrono::steady_clock::now();
    EncodingReport enc = ValidateEncoding(prog, games, 1000 + games);
    std::string line = id + ": " + std::to_string(enc.checked) + " games checked";
    if (enc.assumption_skipped > 0) {
      line += " (" + std::to_string(enc.assumption_skipped) + " outside the assumption)";
    }
    line += ", " + std::to_string(enc.atoms_checked) + " atoms, " +
            std::to_string(enc.violation_count) + " encoding violations";
    out.Require(enc.violation_count == 0, id + " has no encoding violations");
    out.Require(enc.partial == 0, id + " runs every block concretely");
    for (const auto& v : enc.violations) {
      out.Note("  %s game %zu: %s (%.9g vs %.9g)", id.c_str(), v.game_index, v.atom.c_str(),
               v.lhs, v.rhs);
    }
    if (bound_checked.count(id)) {
      const BenchmarkEntry& e = ctx.Entry(id);
      BoundReport br = ValidateBound(prog, e.golden.value, e.golden.delta, games, 2000 + games);
      char buf[160];
      std::snprintf(buf, sizeof buf, "; bound %s: max regret %.5f, %zu violations",
                    e.golden.text.c_str(), br.max_regret, br.violations);
      line += buf;
      out.Require(br.violations == 0, id + " never exceeds its bound");
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.Note("%s (%.1fs)", line.c_str(), secs);
  }
  return out;
}

Outcome Criterion6(Context& ctx) {
  Outcome out;
  const std::size_t samples = ctx.quick ? 10000 : kCrossCheckSamples;
  for (const auto& e : ctx.manifest.entries) {
    const BenchmarkResult& r = ctx.Result(e.id);
    if (!r.ran) {
      out.Require(false, e.id + " produced a certificate");
      continue;
    }
    OptimizationProblem p = LoadBenchmarkProblem(ctx.manifest, e);
    CrossCheckReport cc = CrossCheck(p, r.certificate, samples, 7, kCrossCheckSlack);
    out.Note("%-9s bound %-10s %6zu/%zu feasible samples, max %.6f, %zu violations",
             e.id.c_str(), r.certificate.BoundString().c_str(), cc.accepted, cc.samples,
             cc.max_found, cc.violations);
    out.Require(cc.sound(), e.id + " has no sample above its bound");
  }
  return out;
}

Outcome Criterion7(Context& ctx) {
  Outcome out;
  std::mt19937_64 rng(77);
  for (const auto& e : ctx.manifest.entries) {
    Formula structure;
    if (e.manual) {
      nlohmann::json spec = nlohmann::json::parse(
          ReadTextFile((fs::path(ctx.manifest.directory) / e.source).string()));
      structure = ParseFormulaText(spec.at("constraints").get<std::string>(),
                                   spec.value("players", 2));
    } else {
      CompiledProgram cp = CompileChecked(ctx.Program(e.id), e.id);
      structure = cp.system.structure;
    }
    DnfResult dnf = ToDnfIndexed(structure);
    int disagreements = 0;
    for (int t = 0; t < kDnfAssignments; ++t) {
      std::vector<bool> v(dnf.atoms.size());
      // Even rounds draw mostly true atoms.
      std::bernoulli_distribution coin(t % 2 ? 0.5 : 0.98);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = coin(rng);
      disagreements += EvaluateFormula(structure, v) != EvaluateDnf(dnf, v);
    }
    out.Note("%-9s %4zu atoms, %3zu disjuncts, %d disagreements", e.id.c_str(),
             dnf.atoms.size(), dnf.disjuncts.size(), disagreements);
    out.Require(disagreements == 0, e.id + " DNF agrees with its And/Or tree");
  }
  return out;
}

std::string Fence(const std::string& program) {
  return "Here is the next attempt.\n```\n" + program + "```\n";
}

std::vector<std::string> DiscoveryScript() {
  const std::string dmp =
      "players 2\ndef a():\n  i = Random1()\n  j = BestResponse2(i)\n  k = BestResponse1(j)\nend\n";
  const std::string dmp_renamed =
      "players 2\ndef b():\n  p = Random1()\n  q = BestResponse2(p)\n  s = BestResponse1(q)\nend\n";
  const std::string dmp_annotated =
      "players 2\ndef c():\n  u: Strategy1 = Random1()\n  v = BestResponse2(u)\n"
      "  w = BestResponse1(v)\nend\n";
  const std::string bbm =
      "players 2\ndef bbm():\n  x, y = ZeroSumNE12(u2 - u1)\n  r = BestResponse1(y)\n"
      "  b = BestResponse2(r)\nend\n";
  std::string long_program = "players 2\ndef long():\n";
  for (int k = 0; k < 14; ++k) long_program += "  s" + std::to_string(k) + " = Random1()\n";
  long_program += "  t = Random2()\nend\n";
  const std::string kps =
      "players 2\ndef kps():\n  i = Random1()\n  j = Random2()\n  k = BestResponse1(j)\n"
      "  l = BestResponse2(i)\n  r1 = UniformMixing1(i, k)\n  r2 = UniformMixing2(j, l)\n"
      "  return r1, r2\nend\n";
  const std::string ill_typed =
      "players 2\ndef t():\n  i = Random1()\n  k = BestResponse1(i)\nend\n";
  const std::string ts =
      "players 2\ndef ts():\n  x, y, w, z = StationaryPoint12()\nend\n";
  return {Fence("players 2\ndef x(:\n  i = Random1(\nend\n"),  // 1 syntax error
          Fence(dmp),                                             // 2 analyzed
          Fence(dmp_renamed),                                     // 3 duplicate
          Fence(dmp_annotated),                                   // 4 duplicate
          Fence(dmp),                                             // 5 duplicate, restart
          Fence(bbm),                                             // 6 analyzed
          "!transport-error",                                     // 7 transport error
          Fence(long_program),                                    // 8 strategy cap
          Fence(kps),                                             // 9 analyzed
          Fence(ill_typed),                                       // 10 type error
          Fence(ts),                                              // 11 analyzed
          Fence(dmp_renamed)};                                    // 12 duplicate
}

Outcome Criterion8(Context&) {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / "legone_acceptance_session";
  fs::remove_all(dir);
  DiscoveryConfig config;
  config.allowlist = AllowlistPreset("all");
  config.max_rounds = kDiscoveryRounds;
  config.duplicate_threshold = 3;
  config.transport_retries = 0;
  config.retry_backoff_seconds = 0;
  config.session_dir = dir.string();
  MockTransport transport(DiscoveryScript());
  SessionReport report = RunLoop(config, transport);

  const std::vector<AttemptOutcome> expected{
      AttemptOutcome::kSyntaxError,    AttemptOutcome::kAnalyzed,  AttemptOutcome::kDuplicate,
      AttemptOutcome::kDuplicate,      AttemptOutcome::kDuplicate, AttemptOutcome::kAnalyzed,
      AttemptOutcome::kTransportError, AttemptOutcome::kRejected,  AttemptOutcome::kAnalyzed,
      AttemptOutcome::kSyntaxError,    AttemptOutcome::kAnalyzed,  AttemptOutcome::kDuplicate};
  std::string outcomes;
  for (const auto& a : report.attempts) {
    outcomes += std::string(outcomes.empty() ? "" : " ") + AttemptOutcomeName(a.outcome);
  }
  out.Note("rounds: %s", outcomes.c_str());
  out.Require(report.attempts.size() == expected.size(), "12 rounds recorded");
  for (std::size_t k = 0; k < std::min(expected.size(), report.attempts.size()); ++k) {
    out.Require(report.attempts[k].outcome == expected[k],
                "round " + std::to_string(k + 1) + " is " + AttemptOutcomeName(expected[k]));
  }
  out.Note("restarts: %zu (after round %d), best %s", report.restarts.size(),
           report.restarts.empty() ? 0 : report.restarts[0].round,
           report.best_round ? std::to_string(report.best_bound).c_str() : "none");
  out.Require(report.restarts.size() == 1 && report.restarts[0].reason == "duplicate",
              "exactly one dedup restart");

  out.Require(fs::exists(dir / "session.json"), "session.json written");
  nlohmann::json saved = nlohmann::json::parse(ReadTextFile((dir / "session.json").string()));
  out.Require(saved.at("attempts").size() == report.attempts.size(),
              "session.json lists every round");
  std::size_t rerun = 0;
  for (const auto& a : report.attempts) {
    if (a.outcome != AttemptOutcome::kAnalyzed) continue;
    const fs::path lne = dir / a.program_path, cert = dir / a.certificate_path;
    if (!fs::exists(lne) || !fs::exists(cert)) {
      out.Require(false, "round " + std::to_string(a.round) + " persisted program and certificate");
      continue;
    }
    nlohmann::json jc = nlohmann::json::parse(ReadTextFile(cert.string()));
    CompiledProgram cp = CompileSource(ReadTextFile(lne.string()), "rerun");
    BoundCertificate again = SolveBuiltin(cp.problem, config.solver);
    const bool same = std::fabs(again.bound - jc.at("bound").get<double>()) <= 1e-9 &&
                      again.delta_flag == jc.at("delta").get<bool>();
    out.Require(same, "round " + std::to_string(a.round) + " certificate reproduces");
    rerun += same ? 1 : 0;
  }
  out.Note("%zu analyzed attempts re-run from attempts/NNN.lne with matching bounds", rerun);
  fs::remove_all(dir);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  bool quick = false;
  std::string manifest = DefaultManifestPath();
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_flag("--quick", quick, "smaller samples, for smoke runs only");
  app.add_option("--manifest", manifest, "benchmark manifest");
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.manifest = LoadManifest(manifest);
  ctx.quick = quick;

  const std::vector<std::pair<const char*, std::function<Outcome(Context&)>>> criteria{
      {"automatic benchmarks match their golden bounds", Criterion1},
      {"hand-encoded benchmarks match, labeled manual encoding", Criterion2},
      {"polymatrix 0.5+δ and vertex cover optimum 0", Criterion3},
      {"edge bound closed form agrees with grid search", Criterion4},
      {"concrete oracle finds no encoding or bound violations", Criterion5},
      {"cross-check finds no sample above any certified bound", Criterion6},
      {"DNF agrees with the And/Or tree on random assignments", Criterion7},
      {"mock discovery session: outcomes, one restart, reproducible certificates", Criterion8},
  };
  int failed = 0, ran = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int number = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
    ++ran;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second(ctx);
    } catch (const std::exception& e) {
      o.pass = false;
      o.details.push_back(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", number,
                criteria[k].first, secs);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%d criteria passed%s\n", ran - failed, ran,
              quick ? " (quick mode, not a certification run)" : "");
  return failed == 0 ? 0 : 1;
}
