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

// Command-line entry point.
//
// Exit codes:
//   0  success
//   1  usage error, unreadable input or source diagnostics
//   2  solver or analysis failure
//   3  verification mismatch (benchmark off its golden value, oracle
//      violation, cross-check violation)
//   4  discovery transport or session failure

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "legone/benchmarks.h"
#include "legone/discovery.h"
#include "legone/json_io.h"
#include "legone/oracle.h"
#include "legone/pipeline.h"
#include "legone/solver.h"
#include "legone/tactics.h"

namespace {

using legone::CompiledProgram;
using nlohmann::json;

enum ExitCode { kOk = 0, kInput = 1, kSolver = 2, kMismatch = 3, kDiscovery = 4 };

struct Globals {
  std::string report = "table";
  bool Json() const { return report == "json"; }
};

struct SolverFlags {
  std::string solver = "builtin";
  int restarts = 64;
  std::uint64_t seed = 20240601;
  double tol = 1e-7;

  void Add(CLI::App* app, const std::string& seed_flag = "--seed") {
    app->add_option("--solver", solver, "builtin, export:wolfram or export:json")
        ->capture_default_str();
    app->add_option("--restarts", restarts, "multistart count")->capture_default_str();
    app->add_option(seed_flag, seed, "solver seed")->capture_default_str();
    app->add_option("--tol", tol, "feasibility tolerance")->capture_default_str();
  }

  legone::SolverConfig Config() const {
    legone::SolverConfig c;
    c.restarts = restarts;
    c.seed = seed;
    c.tolerance = tol;
    c.Validate();
    return c;
  }
};

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void PrintDiagnostics(const std::vector<legone::Diagnostic>& diags, const std::string& file) {
  for (const auto& d : diags) std::cerr << d.ToString(file) << "\n";
}

json DiagnosticsJson(const std::vector<legone::Diagnostic>& diags, const std::string& file) {
  json out = json::array();
  for (const auto& d : diags) {
    out.push_back({{"code", d.code},
                   {"severity", d.severity == legone::Severity::kError ? "error" : "warning"},
                   {"line", d.loc.line},
                   {"column", d.loc.col},
                   {"message", d.message},
                   {"text", d.ToString(file)}});
  }
  return out;
}

bool IsManual(const std::string& path) {
  return std::filesystem::path(path).extension() == ".json";
}

legone::SourceProgram LoadProgram(const std::string& path) {
  legone::ParseResult r = legone::ParseAndCheck(legone::ReadTextFile(path));
  if (!r.program) throw legone::DiagnosticsError(r.diagnostics);
  PrintDiagnostics(r.diagnostics, path);
  return std::move(*r.program);
}

int CmdCheck(const Globals& g, const std::string& path) {
  legone::ParseResult r = legone::ParseAndCheck(legone::ReadTextFile(path));
  const bool ok = r.program.has_value();
  if (g.Json()) {
    std::cout << json{{"file", path}, {"ok", ok}, {"diagnostics", DiagnosticsJson(r.diagnostics, path)}}
                     .dump(2)
              << "\n";
  } else {
    PrintDiagnostics(r.diagnostics, path);
    if (ok) std::cout << path << ": ok\n";
  }
  return ok ? kOk : kInput;
}

int CmdAnalyze(const Globals& g, const std::string& path, const SolverFlags& sf,
               const std::string& out, std::size_t cross_check) {
  legone::OptimizationProblem problem;
  if (IsManual(path)) {
    problem = legone::ManualProblem(json::parse(legone::ReadTextFile(path)));
  } else {
    problem = legone::CompileChecked(LoadProgram(path), std::filesystem::path(path).stem())
                  .problem;
  }
  if (sf.solver.rfind("export:", 0) == 0) {
    auto dialect = legone::ParseExportDialect(sf.solver.substr(7));
    if (!dialect) throw CLI::ValidationError("--solver", "unknown export dialect " + sf.solver);
    std::string script = legone::ExportScript(problem, *dialect);
    if (out.empty()) {
      std::cout << script;
    } else {
      WriteText(out, script);
      if (!g.Json()) std::cout << "wrote " << out << "\n";
    }
    if (g.Json() && !out.empty()) std::cout << json{{"export", sf.solver}, {"out", out}}.dump(2) << "\n";
    return kOk;
  }
  if (sf.solver != "builtin") {
    throw CLI::ValidationError("--solver", "unknown solver " + sf.solver);
  }
  legone::BoundCertificate cert = legone::SolveBuiltin(problem, sf.Config());
  json jc = legone::CertificateToJson(cert);
  std::optional<legone::CrossCheckReport> cc;
  if (cross_check > 0) cc = legone::CrossCheck(problem, cert, cross_check, sf.seed);
  if (!out.empty()) WriteText(out, jc.dump(2) + "\n");
  if (g.Json()) {
    json j{{"file", path}, {"bound", cert.BoundString(7)}, {"certificate", jc}};
    if (cc) {
      j["cross_check"] = {{"samples", cc->samples},
                          {"accepted", cc->accepted},
                          {"max_found", cc->max_found},
                          {"violations", cc->violations}};
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << cert.BoundString() << "\n";
    if (cc) {
      std::printf("cross-check: %zu/%zu feasible samples, max %.7f, %zu violations\n",
                  cc->accepted, cc->samples, cc->max_found, cc->violations);
    }
  }
  if (!cert.valid) return kSolver;
  if (cc && !cc->sound()) return kMismatch;
  return kOk;
}

int CmdBench(const Globals& g, const std::string& manifest_path, const std::string& filter,
             const SolverFlags& sf, bool extensions) {
  if (sf.solver != "builtin") {
    throw CLI::ValidationError("--solver", "bench runs the builtin solver only");
  }
  legone::BenchmarkManifest m = legone::LoadManifest(manifest_path);
  legone::SolverConfig config = sf.Config();
  legone::BenchReport report = legone::RunBenchmarks(m, filter, config);
  bool ok = report.AllPassed();
  json jext;
  std::string text_ext;
  if (extensions) {
    legone::BoundCertificate poly = legone::ExtensionPolymatrix(config);
    legone::VertexCoverResult vc = legone::ExtensionVertexCover(10, 2, config);
    const bool poly_ok = poly.valid && poly.delta_flag && std::fabs(poly.bound - 0.5) <= 1e-4;
    ok = ok && poly_ok && vc.certified;
    jext = {{"polymatrix", {{"bound", poly.BoundString(7)}, {"pass", poly_ok}}},
            {"vertex_cover", {{"optimum", vc.certificate.bound}, {"certified", vc.certified}}}};
    char buf[160];
    std::snprintf(buf, sizeof buf, "polymatrix   %s  %s\nvertex cover optimum %.2e  %s\n",
                  poly.BoundString().c_str(), poly_ok ? "PASS" : "FAIL", vc.certificate.bound,
                  vc.certified ? "certified" : "not certified");
    text_ext = buf;
  }
  if (g.Json()) {
    json j = legone::BenchReportToJson(report);
    if (extensions) j["extensions"] = jext;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << legone::BenchReportTable(report) << text_ext;
  }
  return ok ? kOk : kMismatch;
}

int CmdOracle(const Globals& g, const std::string& prog_path, std::size_t games, int size,
              std::uint64_t seed, std::optional<std::string> bound_text,
              const std::string& witness_path, const SolverFlags& sf) {
  legone::SourceProgram prog = LoadProgram(prog_path);
  legone::EncodingReport enc = legone::ValidateEncoding(prog, games, seed, size);

  legone::GoldenBound bound;
  if (bound_text) {
    bound = legone::GoldenBound::Parse(*bound_text);
  } else {
    CompiledProgram cp = legone::CompileChecked(prog, std::filesystem::path(prog_path).stem());
    legone::BoundCertificate cert = legone::SolveBuiltin(cp.problem, sf.Config());
    if (!cert.valid) return kSolver;
    bound.value = cert.bound;
    bound.delta = cert.delta_flag;
    bound.text = cert.BoundString();
  }
  legone::BoundReport br = legone::ValidateBound(prog, bound.value, bound.delta, games, seed, size);

  if (!witness_path.empty()) {
    json w = json::object();
    if (br.witness) {
      w = {{"kind", "BoundViolation"},
           {"regret", br.witness_regret},
           {"game", legone::GameToJson(*br.witness)}};
    } else if (!enc.violations.empty()) {
      const auto& v = enc.violations.front();
      w = {{"kind", "EncodingViolation"}, {"atom", v.atom}, {"game", v.game}};
    }
    WriteText(witness_path, w.dump(2) + "\n");
  }

  const bool ok = enc.violation_count == 0 && br.violations == 0;
  if (g.Json()) {
    json viol = json::array();
    for (const auto& v : enc.violations) {
      viol.push_back({{"game_index", v.game_index},
                      {"atom", v.atom},
                      {"comparison", v.comparison},
                      {"lhs", v.lhs},
                      {"rhs", v.rhs},
                      {"tolerance", v.tolerance}});
    }
    std::cout << json{{"program", prog_path},
                      {"encoding",
                       {{"games", enc.games},
                        {"checked", enc.checked},
                        {"partial", enc.partial},
                        {"assumption_skipped", enc.assumption_skipped},
                        {"atoms_checked", enc.atoms_checked},
                        {"violations", enc.violation_count},
                        {"examples", viol}}},
                      {"bound",
                       {{"bound", bound.text},
                        {"limit", br.limit},
                        {"checked", br.checked},
                        {"max_regret", br.max_regret},
                        {"violations", br.violations}}},
                      {"ok", ok}}
                     .dump(2)
              << "\n";
  } else {
    std::printf("encoding: %zu games, %zu checked, %zu partial, %zu skipped by assumptions, "
                "%zu atoms, %zu violations\n",
                enc.games, enc.checked, enc.partial, enc.assumption_skipped, enc.atoms_checked,
                enc.violation_count);
    for (const auto& v : enc.violations) {
      std::printf("  game %zu: %s  (%s: %.9g vs %.9g)\n", v.game_index, v.atom.c_str(),
                  v.comparison.c_str(), v.lhs, v.rhs);
    }
    std::printf("bound %s: %zu checked, max regret %.6f, limit %.6f, %zu violations\n",
                bound.text.c_str(), br.checked, br.max_regret, br.limit, br.violations);
  }
  return ok ? kOk : kMismatch;
}

int CmdDiscover(const Globals& g, const std::string& config_path, const std::string& mock_path,
                const std::string& session_dir, int rounds) {
  json jc = config_path.empty() ? json::object() : json::parse(legone::ReadTextFile(config_path));
  if (!session_dir.empty()) jc["session_dir"] = session_dir;
  if (rounds > 0) jc["max_rounds"] = rounds;
  legone::DiscoveryConfig config = legone::DiscoveryConfigFromJson(jc);

  std::unique_ptr<legone::ChatTransport> transport;
  if (!mock_path.empty()) {
    json script = json::parse(legone::ReadTextFile(mock_path));
    transport = std::make_unique<legone::MockTransport>(script.get<std::vector<std::string>>());
  } else {
    if (config.endpoint.empty()) {
      throw CLI::ValidationError("discover", "the config names no endpoint; pass --mock to replay a script");
    }
    transport = std::make_unique<legone::HttpTransport>();
  }
  legone::SessionReport rep = legone::RunLoop(config, *transport);
  if (g.Json()) {
    std::cout << legone::SessionToJson(rep, config).dump(2) << "\n";
  } else {
    std::cout << legone::SessionTable(rep);
  }
  return kOk;
}

enum class DumpKind { kAst, kLogic, kAbstract, kProblem };

int CmdDump(DumpKind kind, const std::string& path) {
  if (kind == DumpKind::kProblem && IsManual(path)) {
    json spec = json::parse(legone::ReadTextFile(path));
    std::cout << legone::ProblemToJson(legone::ManualProblem(spec)).dump(2) << "\n";
    return kOk;
  }
  legone::SourceProgram prog = LoadProgram(path);
  if (kind == DumpKind::kAst) {
    std::cout << legone::DumpAstJson(prog) << "\n";
    return kOk;
  }
  CompiledProgram cp = legone::CompileChecked(prog, std::filesystem::path(path).stem());
  json out;
  switch (kind) {
    case DumpKind::kLogic: {
      json parts = json::array();
      for (const auto& p : cp.encoded.parts) parts.push_back(legone::FormulaToJson(p));
      out = {{"players", cp.encoded.player_count},
             {"phi", legone::FormulaToJson(cp.encoded.phi)},
             {"parts", parts},
             {"goal",
              {{"profile", cp.encoded.goal.profile},
               {"objective", legone::ExprToJson(cp.encoded.goal.objective)}}},
             {"delta", cp.encoded.delta_flag}};
      break;
    }
    case DumpKind::kAbstract:
      out = legone::AbstractSystemToJson(cp.system);
      break;
    default:
      out = legone::ProblemToJson(cp.problem);
      break;
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"legone: certify approximation bounds of Nash equilibrium algorithms"};
  app.require_subcommand(1);
  app.allow_extras(false);
  Globals g;
  app.add_option("--report", g.report, "output format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  std::string file, out, manifest = legone::DefaultManifestPath(), filter;
  SolverFlags sf;
  std::size_t cross_check = 0;
  bool extensions = false;

  auto* check = app.add_subcommand("check", "parse and typecheck a program");
  check->add_option("file", file, ".lne source")->required()->check(CLI::ExistingFile);

  auto* analyze = app.add_subcommand("analyze", "compile a program and certify its bound");
  analyze->add_option("file", file, ".lne source or hand-written .json problem")
      ->required()
      ->check(CLI::ExistingFile);
  sf.Add(analyze);
  analyze->add_option("--out", out, "certificate (or export script) destination");
  analyze->add_option("--cross-check", cross_check, "sample count for the empirical check");

  auto* bench = app.add_subcommand("bench", "run the benchmark corpus");
  bench->add_option("--manifest", manifest, "manifest path")->capture_default_str();
  bench->add_option("--filter", filter, "regex over entry ids");
  bench->add_flag("--extensions", extensions, "also run the polymatrix and vertex-cover checks");
  SolverFlags bench_sf;
  bench_sf.Add(bench);

  auto* oracle = app.add_subcommand("oracle", "execute a program on random games");
  std::string prog_path, witness;
  std::size_t games = 1000;
  int size = 0;
  std::uint64_t oracle_seed = 1;
  std::optional<std::string> bound_text;
  oracle->add_option("--prog", prog_path, ".lne source")->required()->check(CLI::ExistingFile);
  oracle->add_option("--games", games, "number of games")->capture_default_str();
  oracle->add_option("--size", size, "max actions per player (0 picks 5 or 3)");
  oracle->add_option("--seed", oracle_seed, "game seed")->capture_default_str();
  oracle->add_option("--bound", bound_text, "bound to test, e.g. 0.5 or 0.33933+d; solved when absent");
  oracle->add_option("--save-witness", witness, "write the first counterexample game as JSON");
  SolverFlags oracle_sf;
  oracle_sf.Add(oracle, "--solver-seed");

  auto* discover = app.add_subcommand("discover", "run the proposal and analysis loop");
  std::string config_path, mock_path, session_dir;
  int rounds = 0;
  discover->add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);
  discover->add_option("--mock", mock_path, "JSON array of scripted replies")
      ->check(CLI::ExistingFile);
  discover->add_option("--session", session_dir, "session directory (overrides the config)");
  discover->add_option("--rounds", rounds, "round limit (overrides the config)");

  auto add_dump = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("file", file, ".lne source")->required()->check(CLI::ExistingFile);
    return sub;
  };
  auto* dump_ast = add_dump("dump-ast", "print the syntax tree as JSON");
  auto* dump_logic = add_dump("dump-logic", "print the logical encoding as JSON");
  auto* dump_abstract = add_dump("dump-abstract", "print the abstracted system as JSON");
  auto* dump_problem = add_dump("dump-problem", "print the optimization problem as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInput;
  }

  try {
    if (*check) return CmdCheck(g, file);
    if (*analyze) return CmdAnalyze(g, file, sf, out, cross_check);
    if (*bench) return CmdBench(g, manifest, filter, bench_sf, extensions);
    if (*oracle) {
      return CmdOracle(g, prog_path, games, size, oracle_seed, bound_text, witness, oracle_sf);
    }
    if (*discover) return CmdDiscover(g, config_path, mock_path, session_dir, rounds);
    if (*dump_ast) return CmdDump(DumpKind::kAst, file);
    if (*dump_logic) return CmdDump(DumpKind::kLogic, file);
    if (*dump_abstract) return CmdDump(DumpKind::kAbstract, file);
    if (*dump_problem) return CmdDump(DumpKind::kProblem, file);
  } catch (const legone::DiagnosticsError& e) {
    PrintDiagnostics(e.diagnostics(), file.empty() ? prog_path : file);
    return kInput;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const legone::SolverError& e) {
    std::cerr << "solver error[" << e.kind() << "]: " << e.what() << "\n";
    return kSolver;
  } catch (const legone::TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kDiscovery;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "analysis error: " << e.what() << "\n";
    return kSolver;
  }
  return kInput;
}
