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

#ifndef LEGONE_COMPILER_H_
#define LEGONE_COMPILER_H_

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legone/logic.h"
#include "legone/tactics.h"

namespace legone {

class CompileError : public std::runtime_error {
 public:
  CompileError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

inline constexpr std::size_t kDefaultDisjunctCap = 1024;

// Strips existential binders; each bound real becomes a free variable with
// its declared box. Throws CompileError("MissingBox").
AbstractSystem EliminateExistentials(const AbstractSystem& sys);

// DNF over atom indices. Atoms are numbered in VisitAtoms order.
struct DnfResult {
  std::vector<AtomicProperty> atoms;
  std::vector<std::vector<int>> disjuncts;
};

// Left-to-right distributive expansion. Throws
// CompileError("DisjunctExplosion") above `cap` disjuncts.
DnfResult ToDnfIndexed(const Formula& f, std::size_t cap = kDefaultDisjunctCap);
std::vector<std::vector<Comparison>> ToDnf(const Formula& f,
                                           std::size_t cap = kDefaultDisjunctCap);

// Truth value of the And/Or tree and of a DNF under an assignment of truth
// values to atoms (indexed as in DnfResult::atoms).
bool EvaluateFormula(const Formula& f, const std::vector<bool>& atom_values);
bool EvaluateDnf(const DnfResult& dnf, const std::vector<bool>& atom_values);

struct ProblemVariable {
  std::string name;
  double lo = 0;
  double hi = 1;
  std::string origin;
};

struct Disjunct {
  std::vector<Comparison> constraints;  // ops are <=, >= or =
  Expr objective;
  int dnf_index = 0;
  std::string label;
};

struct OptimizationProblem {
  std::string name;
  std::vector<ProblemVariable> variables;
  std::vector<Disjunct> disjuncts;
  Expr objective;  // before case splitting
  bool delta_flag = false;
  std::size_t dnf_disjuncts = 0;
  std::size_t trivially_infeasible = 0;

  int IndexOf(const std::string& name) const;
};

struct BuildOptions {
  // Case-split min/max into disjuncts; when false they reach the solver.
  bool split_minmax = true;
  std::size_t disjunct_cap = kDefaultDisjunctCap;
};

// Maximize the objective subject to the structure, with delta set to zero.
// Throws CompileError("UnboundedVariable") for a variable without a box.
OptimizationProblem BuildProblem(const AbstractSystem& sys,
                                 const BuildOptions& options = {});

// Case split of a single comparison into a DNF of comparisons without
// splittable min/max. Strict comparisons are closed.
std::vector<std::vector<Comparison>> SplitComparison(const Comparison& c,
                                                     std::size_t cap);

// Replaces trivial arithmetic (x+0, 1*x, 0*x, x/1, --x).
Expr Simplify(const Expr& e);

nlohmann::json ProblemToJson(const OptimizationProblem& p);
OptimizationProblem ProblemFromJson(const nlohmann::json& j);

}  // namespace legone

#endif  // LEGONE_COMPILER_H_
