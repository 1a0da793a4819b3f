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

#ifndef LEGONE_ENCODE_H_
#define LEGONE_ENCODE_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "legone/dsl.h"
#include "legone/logic.h"

namespace legone {

class EncodeError : public std::runtime_error {
 public:
  EncodeError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

struct ProofGoal {
  std::vector<std::string> profile;  // returned strategy per player
  Expr objective;                    // max_i f_i(profile)
};

// Constructed strategies per player, in statement order.
using StrategyUniverse = std::vector<std::vector<std::string>>;

struct EncodedProgram {
  int player_count = 2;
  Formula phi;                  // inherent formulas followed by statements
  std::vector<Formula> parts;   // [0] inherent, [k+1] statement k
  ProofGoal goal;
  StrategyUniverse universe;
  std::vector<PayoffExpr> payoff_set;  // base payoffs then program literals
  bool delta_flag = false;
};

// Name of the fresh existential variable `base` in statement `index`.
std::string FreshRealName(const std::string& base, int index);

// Encoding of statement `index` of `prog`, with formals replaced by actual
// identifiers and existential reals renamed freshly. Origins carry the
// statement index and block name.
Formula EncodeStatement(const SourceProgram& prog, int index);

// Full encoding. Applies AutoReturn first when the option is set; throws
// EncodeError("MissingReturn") when no return profile is available.
EncodedProgram EncodeProgram(const SourceProgram& prog);

bool MentionsDelta(const Formula& f);

}  // namespace legone

#endif  // LEGONE_ENCODE_H_
