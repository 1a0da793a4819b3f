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

#ifndef LEGONE_DSL_H_
#define LEGONE_DSL_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "legone/logic.h"

namespace legone {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

enum class Severity { kError, kWarning };

// Machine-readable diagnostic. `code` is one of LexError, SyntaxError,
// DuplicateName, UnknownBlock, ArityMismatch, TypeMismatch, SSAViolation,
// MissingReturn, or a warning code such as BranchingUnsupported.
struct Diagnostic {
  std::string code;
  Severity severity = Severity::kError;
  SourceLoc loc;
  std::string message;

  // "<file>:<line>:<col>: error[Code]: message"
  std::string ToString(std::string_view file = "input") const;
};

bool HasErrors(const std::vector<Diagnostic>& diags);

struct Param {
  std::string name;
  BasicType type;
};

// How the concrete oracle realizes a user-declared block.
enum class Realize {
  kDefault,  // assumption when the block has no outputs, otherwise opaque
  kAssume,   // no outputs; the encoding is checked and enforced by branching
  kNash,     // outputs form an exact equilibrium of the induced subgame
};

struct BlockDecl {
  std::string name;
  std::vector<Param> inputs;
  std::vector<Param> outputs;  // empty means None
  Formula encoding;
  Realize realize = Realize::kDefault;
  SourceLoc loc;
};

struct Argument {
  enum class Kind { kIdent, kPayoff, kNumber };
  Kind kind = Kind::kIdent;
  std::string ident;
  PayoffExpr payoff;
  Rational number;
  SourceLoc loc;

  std::string ToString() const;
};

struct Statement {
  std::vector<std::string> outputs;
  std::vector<std::optional<BasicType>> annotations;  // parallel to outputs
  std::string block;
  std::vector<Argument> args;
  SourceLoc loc;
};

struct AlgorithmBody {
  std::string name = "algorithm";
  std::vector<Statement> statements;
  std::optional<std::vector<std::string>> return_profile;
  SourceLoc return_loc;
};

struct CompileOptions {
  bool auto_return_optimal_mixing = false;
  bool delta_symbolic = true;
};

struct SourceProgram {
  int player_count = 2;
  std::vector<BlockDecl> blocks;
  AlgorithmBody algorithm;
  CompileOptions options;
};

struct ParseResult {
  std::optional<SourceProgram> program;
  std::vector<Diagnostic> diagnostics;
};

// Lexes and parses `.lne` source. Structural errors (syntax, duplicate
// declarations, SSA) are reported here; typing errors by Typecheck.
ParseResult Parse(std::string_view source);

// Full validation of a parsed program: block resolution, arity, types,
// SSA, return profile. Never throws.
std::vector<Diagnostic> Typecheck(const SourceProgram& prog);

// Parse followed by Typecheck; `program` is empty when any error exists.
ParseResult ParseAndCheck(std::string_view source);

// Canonical source text; Parse(PrettyPrint(p)) reproduces p.
std::string PrettyPrint(const SourceProgram& prog);

// Canonical JSON rendering with stable key order.
std::string DumpAstJson(const SourceProgram& prog);

// Declared type of every identifier assigned in the algorithm, in order.
std::vector<std::pair<std::string, BasicType>> StrategyVariables(
    const SourceProgram& prog);

// Payoff literals used as arguments anywhere in the algorithm, deduplicated
// in first-use order.
std::vector<PayoffExpr> PayoffLiterals(const SourceProgram& prog);

const BlockDecl* FindUserBlock(const SourceProgram& prog,
                               const std::string& name);

// Standalone expression and formula parsing with the encoding grammar, used
// for hand-encoded systems. `players` sets the arity of the `f(...)` sugar.
// Throws std::invalid_argument with a located message.
Expr ParseExprText(std::string_view text, int players = 2);
Formula ParseFormulaText(std::string_view text, int players = 2);

}  // namespace legone

#endif  // LEGONE_DSL_H_
