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

#ifndef LEGONE_SRC_DISJUNCT_MODEL_H_
#define LEGONE_SRC_DISJUNCT_MODEL_H_

#include <optional>
#include <utility>
#include <vector>

#include "legone/compiler.h"
#include "legone/eval.h"

namespace legone::internal {

// One disjunct in numeric form: box, linear rows lo <= a.x <= hi, nonlinear
// rows lo <= c(x) <= hi, and an objective that is either affine or the
// minimum of a list of pieces.
struct DisjunctModel {
  int n = 0;
  std::vector<double> lb, ub;
  struct LinearRow {
    std::vector<std::pair<int, double>> coefs;
    double lo, hi;
  };
  std::vector<LinearRow> linear;
  struct NonlinearRow {
    CompiledExpr c;
    double lo, hi;
  };
  std::vector<NonlinearRow> nonlinear;
  std::optional<AffineForm> affine_objective;
  std::vector<CompiledExpr> pieces;
  bool infeasible = false;  // detected while building

  bool IsLinear() const { return nonlinear.empty() && affine_objective.has_value(); }
  double Objective(const std::vector<double>& x) const;
  // Sum and maximum of the row and box violations.
  double Violation(const std::vector<double>& x, double* max_violation) const;
};

// `presolve` folds single-variable rows into the box and merges duplicate
// rows; the cross-checker turns it off to test the raw constraints.
DisjunctModel BuildModel(const OptimizationProblem& problem, std::size_t index,
                         bool presolve);

}  // namespace legone::internal

#endif  // LEGONE_SRC_DISJUNCT_MODEL_H_
