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

#include "legone/pipeline.h"

#include <fstream>
#include <map>
#include <sstream>

namespace legone {
namespace {

std::string JoinDiagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (d.severity != Severity::kError) continue;
    if (!out.empty()) out += "\n";
    out += d.ToString();
  }
  return out.empty() ? "invalid program" : out;
}

Rational BoxEnd(const nlohmann::json& j) {
  return Rational::Parse(j.is_string() ? j.get<std::string>() : j.dump());
}

}  // namespace

DiagnosticsError::DiagnosticsError(std::vector<Diagnostic> diags)
    : std::runtime_error(JoinDiagnostics(diags)), diags_(std::move(diags)) {}

CompiledProgram CompileSource(std::string_view source, const std::string& name,
                              const BuildOptions& options) {
  ParseResult parsed = ParseAndCheck(source);
  if (!parsed.program) throw DiagnosticsError(std::move(parsed.diagnostics));
  return CompileChecked(std::move(*parsed.program), name, options);
}

CompiledProgram CompileChecked(SourceProgram program, const std::string& name,
                               const BuildOptions& options) {
  CompiledProgram c;
  c.program = std::move(program);
  c.encoded = EncodeProgram(c.program);
  c.system = Abstract(c.encoded, &c.stats);
  c.problem = BuildProblem(EliminateExistentials(c.system), options);
  c.problem.name = name;
  return c;
}

OptimizationProblem ManualProblem(const nlohmann::json& spec) {
  try {
    const int players = spec.value("players", 2);
    AbstractSystem sys;
    sys.player_count = players;
    sys.delta_flag = spec.value("delta", false);
    std::map<std::string, std::string> origins;
    for (const auto& v : spec.at("variables")) {
      AbstractVariable av;
      av.name = v.at("name").get<std::string>();
      av.lo = BoxEnd(v.at("lo"));
      av.hi = BoxEnd(v.at("hi"));
      av.origin = Term::Var(av.name);
      origins[av.name] = v.value("origin", "");
      sys.variables.push_back(std::move(av));
    }
    sys.objective = ParseExprText(spec.at("objective").get<std::string>(), players);
    const auto& cons = spec.at("constraints");
    sys.structure = cons.is_null() ? MakeTrue()
                                   : ParseFormulaText(cons.get<std::string>(), players);
    OptimizationProblem p = BuildProblem(sys);
    p.name = spec.value("name", "manual");
    p.delta_flag = sys.delta_flag;
    for (auto& v : p.variables) {
      auto it = origins.find(v.name);
      if (it != origins.end()) v.origin = it->second;
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed manual problem: ") + e.what());
  }
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace legone
