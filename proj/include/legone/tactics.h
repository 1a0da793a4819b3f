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

#ifndef LEGONE_TACTICS_H_
#define LEGONE_TACTICS_H_

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legone/encode.h"
#include "legone/logic.h"

namespace legone {

struct InstantiationStats {
  std::size_t procedure1 = 0;  // atoms produced by substitution
  std::size_t procedure2 = 0;  // atoms produced by the max operator
  std::vector<std::string> warnings;
};

// Algorithm 1 on one atomic property. The result is a conjunction of
// strategy- and payoff-quantifier-free atoms; existential prefixes are kept.
// Payoff applications over linear combinations are expanded by linearity.
Formula Instantiate(const AtomicProperty& atom, const StrategyUniverse& universe,
                    const std::vector<PayoffExpr>& payoff_set,
                    InstantiationStats* stats = nullptr);

// Instantiate applied to every atom, keeping the And/Or shape.
Formula InstantiateFormula(const Formula& f, const StrategyUniverse& universe,
                           const std::vector<PayoffExpr>& payoff_set,
                           InstantiationStats* stats = nullptr);

struct AbstractVariable {
  std::string name;
  Rational lo = 0;
  Rational hi = 1;
  bool has_box = true;
  bool existential = false;
  Term origin;  // the term this variable abstracts
};

struct AbstractSystem {
  int player_count = 2;
  std::vector<AbstractVariable> variables;
  // Quantifier-free over strategies and payoffs. Existential binders remain
  // on atoms until EliminateExistentials.
  Formula structure;
  Expr objective;
  bool delta_flag = false;
  std::vector<std::string> warnings;

  const AbstractVariable* Find(const std::string& name) const;
};

struct ForgetOptions {
  int player_count = 2;
  // Boxes for free real variables that no existential binder declares.
  std::map<std::string, std::pair<Rational, Rational>> real_boxes;
};

// Algorithm 2: every distinct term becomes a fresh real variable. Real
// variables keep their names; delta stays symbolic.
AbstractSystem Forget(const Formula& instantiated, const Expr& objective,
                      const ForgetOptions& options);

// Instantiation followed by forgetting for a whole encoded program.
AbstractSystem Abstract(const EncodedProgram& enc,
                        InstantiationStats* stats = nullptr);

nlohmann::json AbstractSystemToJson(const AbstractSystem& sys);

}  // namespace legone

#endif  // LEGONE_TACTICS_H_
