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

#include <sstream>

#include "legone/solver.h"

namespace legone {
namespace {

class WolframWriter {
 public:
  explicit WolframWriter(const OptimizationProblem& p) : p_(p) {}

  std::string Symbol(const std::string& name) const {
    int idx = p_.IndexOf(name);
    if (idx < 0) {
      throw SolverError("UnsupportedExpression", "undeclared variable '" + name + "'");
    }
    return "v" + std::to_string(idx + 1);
  }

  std::string Expr(const legone::Expr& e) const {
    switch (e->op) {
      case ExprOp::kTerm:
        if (e->term.kind == TermKind::kConstant) {
          return "(" + e->term.value.ToString() + ")";
        }
        if (e->term.kind == TermKind::kRealVar) return Symbol(e->term.name);
        throw SolverError("UnsupportedExpression",
                          "term " + e->term.ToString() + " is not a variable");
      case ExprOp::kAdd:
        return "(" + Expr(e->kids[0]) + " + " + Expr(e->kids[1]) + ")";
      case ExprOp::kSub:
        return "(" + Expr(e->kids[0]) + " - " + Expr(e->kids[1]) + ")";
      case ExprOp::kMul:
        return "(" + Expr(e->kids[0]) + " * " + Expr(e->kids[1]) + ")";
      case ExprOp::kDiv:
        return "(" + Expr(e->kids[0]) + " / " + Expr(e->kids[1]) + ")";
      case ExprOp::kNeg:
        return "(-" + Expr(e->kids[0]) + ")";
      case ExprOp::kMin:
      case ExprOp::kMax: {
        std::string s = e->op == ExprOp::kMin ? "Min[" : "Max[";
        for (std::size_t i = 0; i < e->kids.size(); ++i) {
          s += (i ? ", " : "") + Expr(e->kids[i]);
        }
        return s + "]";
      }
      case ExprOp::kSelect:
        return "If[" + Expr(e->kids[0]) + " > 0, " + Expr(e->kids[1]) + ", " +
               Expr(e->kids[2]) + "]";
    }
    return "";
  }

  std::string Comparison(const legone::Comparison& c) const {
    const char* op = "<=";
    switch (c.op) {
      case CmpOp::kLe:
      case CmpOp::kLt:
        op = "<=";
        break;
      case CmpOp::kGe:
      case CmpOp::kGt:
        op = ">=";
        break;
      case CmpOp::kEq:
        op = "==";
        break;
    }
    return Expr(c.lhs) + " " + op + " " + Expr(c.rhs);
  }

 private:
  const OptimizationProblem& p_;
};

std::string Number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  std::string s = os.str();
  auto e = s.find('e');
  if (e != std::string::npos) s = s.substr(0, e) + "*^" + s.substr(e + 1);
  return s;
}

std::string Wolfram(const OptimizationProblem& p) {
  WolframWriter w(p);
  std::ostringstream os;
  os << "(* " << (p.name.empty() ? "problem" : p.name) << ": maximize each disjunct; "
     << "the bound is the largest optimum" << (p.delta_flag ? ", plus delta" : "")
     << " *)\n";
  for (std::size_t j = 0; j < p.variables.size(); ++j) {
    os << "(* v" << j + 1 << " = " << p.variables[j].name;
    if (!p.variables[j].origin.empty()) os << " : " << p.variables[j].origin;
    os << " *)\n";
  }
  os << "vars = {";
  for (std::size_t j = 0; j < p.variables.size(); ++j) {
    os << (j ? ", " : "") << "v" << j + 1;
  }
  os << "};\n";
  os << "box = ";
  for (std::size_t j = 0; j < p.variables.size(); ++j) {
    os << (j ? " && " : "") << Number(p.variables[j].lo) << " <= v" << j + 1
       << " <= " << Number(p.variables[j].hi);
  }
  if (p.variables.empty()) os << "True";
  os << ";\n";
  for (std::size_t d = 0; d < p.disjuncts.size(); ++d) {
    const Disjunct& dj = p.disjuncts[d];
    os << "(* " << dj.label << " *)\n";
    os << "sol" << d + 1 << " = NMaximize[{" << w.Expr(dj.objective) << ", ";
    for (const auto& c : dj.constraints) os << w.Comparison(c) << " && ";
    os << "box}, vars, AccuracyGoal -> 10, WorkingPrecision -> 20, "
          "MaxIterations -> 2000];\n";
  }
  os << "bound = Max[";
  for (std::size_t d = 0; d < p.disjuncts.size(); ++d) {
    os << (d ? ", " : "") << "sol" << d + 1 << "[[1]]";
  }
  os << "];\nPrint[bound]\n";
  return os.str();
}

}  // namespace

std::optional<ExportDialect> ParseExportDialect(const std::string& s) {
  if (s == "wolfram" || s == "wolfram-nmaximize") return ExportDialect::kWolframNMaximize;
  if (s == "json" || s == "generic-json") return ExportDialect::kGenericJson;
  return std::nullopt;
}

std::string ExportScript(const OptimizationProblem& problem, ExportDialect dialect) {
  if (problem.disjuncts.empty()) {
    throw SolverError("UnsupportedExpression", "problem has no disjuncts to export");
  }
  switch (dialect) {
    case ExportDialect::kWolframNMaximize:
      return Wolfram(problem);
    case ExportDialect::kGenericJson:
      return ProblemToJson(problem).dump(2) + "\n";
  }
  return "";
}

}  // namespace legone
