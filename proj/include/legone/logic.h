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

#ifndef LEGONE_LOGIC_H_
#define LEGONE_LOGIC_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "legone/rational.h"

namespace legone {

inline constexpr const char* kDeltaName = "delta";
// Placeholder for the bound slot of a MaxPayoff term.
inline constexpr const char* kBoundSlot = "*";

enum class TypeKind { kNone, kReal, kPayoff, kComp, kStrategy };

struct BasicType {
  TypeKind kind = TypeKind::kNone;
  int player = 0;  // 1-based, only for kStrategy

  static BasicType None() { return {TypeKind::kNone, 0}; }
  static BasicType Real() { return {TypeKind::kReal, 0}; }
  static BasicType Payoff() { return {TypeKind::kPayoff, 0}; }
  static BasicType Comp() { return {TypeKind::kComp, 0}; }
  static BasicType Strategy(int p) { return {TypeKind::kStrategy, p}; }
  bool IsStrategy() const { return kind == TypeKind::kStrategy; }
  std::string ToString() const;
  friend bool operator==(const BasicType& a, const BasicType& b) {
    return a.kind == b.kind && a.player == b.player;
  }
  friend bool operator!=(const BasicType& a, const BasicType& b) {
    return !(a == b);
  }
};

// Either a rational combination of base payoffs or a named payoff variable.
struct PayoffExpr {
  std::vector<std::pair<int, Rational>> coeffs;  // sorted, nonzero
  std::string variable;

  static PayoffExpr Base(int player);
  static PayoffExpr Variable(std::string name);
  static PayoffExpr Combination(std::vector<std::pair<int, Rational>> terms);

  bool IsVariable() const { return !variable.empty(); }
  // Single base payoff with coefficient one.
  bool IsBase() const;
  // Interval of values when every base payoff ranges over [0,1].
  std::pair<Rational, Rational> Range() const;
  std::string ToString() const;
  friend bool operator==(const PayoffExpr& a, const PayoffExpr& b) {
    return a.coeffs == b.coeffs && a.variable == b.variable;
  }
  friend bool operator<(const PayoffExpr& a, const PayoffExpr& b);
};

enum class TermKind { kPayoff, kLoss, kMaxPayoff, kRealVar, kConstant };

struct Term {
  TermKind kind = TermKind::kConstant;
  PayoffExpr payoff;              // kPayoff, kMaxPayoff
  int player = 0;                 // kLoss player, kMaxPayoff bound player
  std::vector<std::string> args;  // one strategy name per player slot
  std::string name;               // kRealVar
  Rational value;                 // kConstant

  static Term PayoffApp(PayoffExpr p, std::vector<std::string> args);
  static Term Loss(int player, std::vector<std::string> args);
  // args[bound_player-1] is replaced by kBoundSlot.
  static Term MaxPayoff(int bound_player, PayoffExpr p,
                        std::vector<std::string> args);
  static Term Var(std::string name);
  static Term Const(Rational v);

  // Canonical syntactic key; equal keys iff equal terms.
  std::string Key() const;
  // Surface syntax, e.g. "u1(i, j)", "max u1(*, j)".
  std::string ToString() const;
};

enum class ExprOp { kTerm, kAdd, kSub, kMul, kDiv, kNeg, kMin, kMax, kSelect };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op = ExprOp::kTerm;
  Term term;
  std::vector<Expr> kids;
  // Min/Max nodes flagged here are never case-split by the compiler.
  bool keep = false;
};

Expr MakeTerm(Term t);
Expr MakeConst(Rational v);
Expr MakeVar(const std::string& name);
Expr MakeAdd(Expr a, Expr b);
Expr MakeSub(Expr a, Expr b);
Expr MakeMul(Expr a, Expr b);
Expr MakeDiv(Expr a, Expr b);
Expr MakeNeg(Expr a);
Expr MakeMin(std::vector<Expr> kids, bool keep = false);
Expr MakeMax(std::vector<Expr> kids, bool keep = false);
// Evaluates to `then_e` when cond > 0 and to `else_e` otherwise.
Expr MakeSelect(Expr cond, Expr then_e, Expr else_e);
Expr MakeSum(const std::vector<Expr>& parts);

std::string ExprToString(const Expr& e);
bool ExprEqual(const Expr& a, const Expr& b);
std::optional<Rational> ConstValue(const Expr& e);

// Rebuilds the tree, mapping every leaf term through `fn`.
Expr MapTerms(const Expr& e, const std::function<Expr(const Term&)>& fn);
void VisitTerms(const Expr& e, const std::function<void(const Term&)>& fn);
bool ContainsMinMax(const Expr& e);
// Replaces PayoffApp over a combination by the linear expansion over base
// payoffs. MaxPayoff terms are left intact.
Expr ExpandLinear(const Expr& e);

enum class CmpOp { kLe, kGe, kEq, kLt, kGt };
const char* CmpOpSymbol(CmpOp op);

// Where a constraint came from; used by diagnostics and the oracle.
struct Origin {
  int statement = -1;  // -1 for the inherent formulas and the goal
  std::string block;   // block name or inherent family
  bool approximate = false;
};

struct Comparison {
  Expr lhs;
  CmpOp op = CmpOp::kLe;
  Expr rhs;
  Origin origin;
};

std::string ComparisonToString(const Comparison& c);
// Numeric check with slack `tol` for the given leaf valuation.
bool ComparisonHolds(const Comparison& c, double lhs, double rhs, double tol);

struct RealBinder {
  std::string name;
  Rational lo = 0;
  Rational hi = 1;
};

struct StrategyBinder {
  int player = 0;
  std::string name;
};

struct AtomicProperty {
  std::vector<RealBinder> exists;
  std::vector<StrategyBinder> forall_strategies;
  std::vector<std::string> forall_payoffs;
  std::vector<Comparison> body;  // conjunction
  Origin origin;

  bool IsQuantifierFree() const {
    return forall_strategies.empty() && forall_payoffs.empty();
  }
};

std::string AtomToString(const AtomicProperty& a);

enum class FormulaKind { kAtom, kAnd, kOr };

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
  FormulaKind kind = FormulaKind::kAnd;
  AtomicProperty atom;
  std::vector<Formula> kids;
};

Formula MakeAtom(AtomicProperty a);
Formula MakeAnd(std::vector<Formula> kids);
Formula MakeOr(std::vector<Formula> kids);
Formula MakeTrue();
// Flattens nested And/And and Or/Or, drops empty conjunctions inside Ands.
Formula Flatten(const Formula& f);
void VisitAtoms(const Formula& f,
                const std::function<void(const AtomicProperty&)>& fn);
Formula MapAtoms(const Formula& f,
                 const std::function<Formula(const AtomicProperty&)>& fn);
std::size_t CountAtoms(const Formula& f);
std::string FormulaToString(const Formula& f, int indent = 0);

// Substitutions used when instantiating templates and quantifiers.
struct Substitution {
  std::map<std::string, std::string> strategies;
  std::map<std::string, PayoffExpr> payoffs;
  std::map<std::string, Expr> reals;
};
Term SubstituteTerm(const Term& t, const Substitution& s);
Expr SubstituteExpr(const Expr& e, const Substitution& s);
Comparison SubstituteComparison(const Comparison& c, const Substitution& s);
AtomicProperty SubstituteAtom(const AtomicProperty& a, const Substitution& s);
Formula SubstituteFormula(const Formula& f, const Substitution& s);

}  // namespace legone

#endif  // LEGONE_LOGIC_H_
