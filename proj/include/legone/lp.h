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

#ifndef LEGONE_LP_H_
#define LEGONE_LP_H_

#include <limits>
#include <utility>
#include <vector>

namespace legone {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// maximize c.x subject to lo_r <= a_r.x <= hi_r and lb <= x <= ub.
struct LpProblem {
  int n = 0;
  std::vector<double> c;
  std::vector<double> lb;
  std::vector<double> ub;
  struct Row {
    std::vector<std::pair<int, double>> coefs;
    double lo = -kInf;
    double hi = kInf;
  };
  std::vector<Row> rows;
  // Optional starting point inside the bounds; rows it satisfies start
  // feasible, which avoids most of phase one.
  std::vector<double> x0;

  int AddVariable(double lo, double hi, double cost = 0);
  void AddRow(std::vector<std::pair<int, double>> coefs, double lo, double hi);
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* LpStatusName(LpStatus s);

struct LpOptions {
  int max_iterations = 50000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0;
  std::vector<double> x;
  int iterations = 0;
};

// Dense bounded primal simplex with an artificial-variable phase one.
LpResult SolveLp(const LpProblem& problem, const LpOptions& options = {});

}  // namespace legone

#endif  // LEGONE_LP_H_
