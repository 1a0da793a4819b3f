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

#ifndef LEGONE_PIPELINE_H_
#define LEGONE_PIPELINE_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "legone/compiler.h"
#include "legone/dsl.h"
#include "legone/encode.h"
#include "legone/tactics.h"

namespace legone {

// Raised when a source program does not parse or typecheck.
class DiagnosticsError : public std::runtime_error {
 public:
  explicit DiagnosticsError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

struct CompiledProgram {
  SourceProgram program;
  EncodedProgram encoded;
  InstantiationStats stats;
  AbstractSystem system;
  OptimizationProblem problem;
};

// Parse, typecheck, encode, abstract, eliminate existentials and build the
// optimization problem. Encoding and compilation errors propagate unchanged.
CompiledProgram CompileSource(std::string_view source, const std::string& name,
                              const BuildOptions& options = {});
// Same, for a program that already passed ParseAndCheck.
CompiledProgram CompileChecked(SourceProgram program, const std::string& name,
                               const BuildOptions& options = {});

// Hand-written problem: {"name", "delta", "players", "variables": [{"name",
// "lo", "hi", "origin"}], "objective": expr text, "constraints": formula
// text}. Throws std::invalid_argument on malformed input.
OptimizationProblem ManualProblem(const nlohmann::json& spec);

std::string ReadTextFile(const std::string& path);

}  // namespace legone

#endif  // LEGONE_PIPELINE_H_
