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

#ifndef LEGONE_JSON_IO_H_
#define LEGONE_JSON_IO_H_

#include <nlohmann/json.hpp>

#include "legone/logic.h"

namespace legone {

// Expressions render as nested arrays, e.g. ["add", ["var", "a1"],
// ["const", "1/2"]]; terms as ["payoff", "u1", ["i", "j"]],
// ["loss", 2, ["i", "j"]], ["maxpayoff", 1, "u1", ["*", "j"]].
nlohmann::json TermToJson(const Term& t);
nlohmann::json ExprToJson(const Expr& e);
Expr ExprFromJson(const nlohmann::json& j);
nlohmann::json ComparisonToJson(const Comparison& c);
nlohmann::json AtomToJson(const AtomicProperty& a);
nlohmann::json FormulaToJson(const Formula& f);

}  // namespace legone

#endif  // LEGONE_JSON_IO_H_
