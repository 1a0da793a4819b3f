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

#ifndef LEGONE_ORACLE_H_
#define LEGONE_ORACLE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legone/dsl.h"
#include "legone/logic.h"

namespace legone {

class OracleError : public std::runtime_error {
 public:
  OracleError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// Normal-form game with payoffs in [0,1]. payoffs[i] is player i+1's tensor
// in row-major order over the action profile.
struct ConcreteGame {
  std::vector<int> actions;
  std::vector<std::vector<double>> payoffs;

  int players() const { return static_cast<int>(actions.size()); }
  std::size_t ProfileCount() const;
  // `profile` holds 0-based actions; `player` is 1-based.
  double Payoff(int player, const std::vector<int>& profile) const;

  static ConcreteGame Uniform(const std::vector<int>& actions, std::mt19937_64& rng);
  static ConcreteGame Constant(const std::vector<int>& actions, double value);
  // Payoff 1 when every player picks the same action index, else 0.
  static ConcreteGame IdentityLike(const std::vector<int>& actions);
  // Uniform game in which player 1's first two actions pay the same.
  static ConcreteGame DuplicatedRows(const std::vector<int>& actions,
                                     std::mt19937_64& rng);
};

nlohmann::json GameToJson(const ConcreteGame& g);
ConcreteGame GameFromJson(const nlohmann::json& j);

using MixedStrategy = std::vector<double>;

// Expected value of payoff expression `u` under a mixed profile (one
// strategy per player).
double ExpectedPayoff(const ConcreteGame& g, const PayoffExpr& u,
                      const std::vector<MixedStrategy>& profile);
// Best value of `u` over pure actions of `player` with the others fixed.
double BestPayoff(const ConcreteGame& g, const PayoffExpr& u, int player,
                  const std::vector<MixedStrategy>& profile);
// Regret f_i of `player`.
double Regret(const ConcreteGame& g, int player,
              const std::vector<MixedStrategy>& profile);
double MaxRegret(const ConcreteGame& g, const std::vector<MixedStrategy>& profile);

// Exact equilibrium of a bimatrix game by support enumeration. a[r][c] and
// b[r][c] are the row and column payoffs.
std::optional<std::pair<MixedStrategy, MixedStrategy>> SolveBimatrix(
    const std::vector<std::vector<double>>& a,
    const std::vector<std::vector<double>>& b);

struct OracleOptions {
  double delta_num = 1e-3;
  int stationary_max_iterations = 10000;
  double grid_step = 1e-2;
  double refine_step = 1e-3;
  std::size_t max_grid_points = 20000;
};

struct TraceStep {
  int statement = 0;
  std::string block;
  std::vector<std::string> outputs;
  std::string note;
};

struct Trace {
  std::map<std::string, MixedStrategy> strategies;
  std::map<std::string, int> player_of;
  std::map<std::string, double> reals;  // existential witnesses, e.g. rho@1
  std::vector<TraceStep> steps;
  std::vector<std::string> profile;
  std::vector<double> regrets;
  bool partial = false;
  std::string note;

  std::vector<MixedStrategy> Profile(const std::vector<std::string>& names) const;
  double MaxRegret() const;
};

nlohmann::json TraceToJson(const Trace& t);

// Runs the program (after AutoReturn when the option is set) on a game.
// Blocks that cannot be executed mark the trace partial instead of throwing.
Trace RunConcrete(const SourceProgram& prog, const ConcreteGame& game,
                  std::uint64_t seed, const OracleOptions& options = {});

// Draws oracle games: uniform payoffs with 2..max_actions actions per player,
// preceded by the corner games (all-zero, all-one, identity-like, duplicated
// rows) when `corners` is set.
class GameSampler {
 public:
  GameSampler(int players, int max_actions, std::uint64_t seed, bool corners = true);
  ConcreteGame Next();

 private:
  int players_;
  int max_actions_;
  bool corners_;
  std::size_t count_ = 0;
  std::mt19937_64 rng_;
};

// Default action cap: 5 for two players, 3 for three or more.
int DefaultMaxActions(int players);

struct EncodingViolation {
  std::size_t game_index = 0;
  std::string atom;
  std::string comparison;
  double lhs = 0;
  double rhs = 0;
  double tolerance = 0;
  nlohmann::json game;
};

struct EncodingReport {
  std::size_t games = 0;
  std::size_t checked = 0;
  std::size_t partial = 0;
  std::size_t assumption_skipped = 0;
  std::size_t atoms_checked = 0;
  std::size_t violation_count = 0;
  std::vector<EncodingViolation> violations;  // first few only
  double worst_excess = 0;
};

EncodingReport ValidateEncoding(const SourceProgram& prog, std::size_t games,
                                std::uint64_t seed, int max_actions = 0,
                                const OracleOptions& options = {});

struct BoundReport {
  std::size_t games = 0;
  std::size_t checked = 0;
  std::size_t partial = 0;
  std::size_t assumption_skipped = 0;
  double bound = 0;
  double limit = 0;  // bound plus delta_num (when flagged) plus 1e-6
  double max_regret = 0;
  std::size_t violations = 0;
  std::optional<ConcreteGame> witness;
  double witness_regret = 0;
};

BoundReport ValidateBound(const SourceProgram& prog, double bound, bool delta_flag,
                          std::size_t games, std::uint64_t seed, int max_actions = 0,
                          const OracleOptions& options = {});

}  // namespace legone

#endif  // LEGONE_ORACLE_H_
