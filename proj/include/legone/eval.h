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

#ifndef LEGONE_EVAL_H_
#define LEGONE_EVAL_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "legone/logic.h"

namespace legone {

// Numeric value of an expression; `leaf` supplies every non-constant term.
// Select evaluates only the taken branch.
double EvaluateExpr(const Expr& e, const std::function<double(const Term&)>& leaf);
double EvaluateExpr(const Expr& e, const std::map<std::string, double>& reals);

// Flattened expression over variables indexed 0..n-1, evaluated repeatedly by
// the solver. Gradients follow the active argument of min/max and the taken
// branch of select.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  // `index_of` maps a real-variable name to its index, or -1 when unknown
  // (which throws std::invalid_argument).
  static CompiledExpr Compile(const Expr& e,
                              const std::function<int(const std::string&)>& index_of);

  double Value(const std::vector<double>& x) const;
  // Overwrites `grad` (resized to `n`) with the gradient at x.
  double ValueAndGradient(const std::vector<double>& x, int n,
                          std::vector<double>& grad) const;

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    ExprOp op;
    int var = -1;       // kTerm variable leaf
    double value = 0;   // kTerm constant leaf
    int first_kid = 0;  // into kids_
    int kid_count = 0;
  };
  int Add(const Expr& e, const std::function<int(const std::string&)>& index_of);
  void Forward(const std::vector<double>& x, std::vector<double>& vals) const;

  std::vector<Node> nodes_;  // post-order; root last
  std::vector<int> kids_;
};

// Affine form sum(coefs) + constant when the expression is affine in the
// variables, otherwise nullopt.
struct AffineForm {
  std::map<int, double> coefs;
  double constant = 0;
};
std::optional<AffineForm> ExtractAffine(
    const Expr& e, const std::function<int(const std::string&)>& index_of);

}  // namespace legone

#endif  // LEGONE_EVAL_H_
