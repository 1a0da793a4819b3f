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

#include "legone/logic.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace legone {

std::string BasicType::ToString() const {
  switch (kind) {
    case TypeKind::kNone:
      return "None";
    case TypeKind::kReal:
      return "Real";
    case TypeKind::kPayoff:
      return "Payoff";
    case TypeKind::kComp:
      return "Comp";
    case TypeKind::kStrategy:
      return "Strategy" + std::to_string(player);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// PayoffExpr

PayoffExpr PayoffExpr::Base(int player) {
  PayoffExpr p;
  p.coeffs.push_back({player, Rational(1)});
  return p;
}

PayoffExpr PayoffExpr::Variable(std::string name) {
  PayoffExpr p;
  p.variable = std::move(name);
  return p;
}

PayoffExpr PayoffExpr::Combination(
    std::vector<std::pair<int, Rational>> terms) {
  std::map<int, Rational> acc;
  for (auto& [k, c] : terms) acc[k] += c;
  PayoffExpr p;
  for (auto& [k, c] : acc) {
    if (!c.IsZero()) p.coeffs.push_back({k, c});
  }
  return p;
}

bool PayoffExpr::IsBase() const {
  return variable.empty() && coeffs.size() == 1 && coeffs[0].second == 1;
}

std::pair<Rational, Rational> PayoffExpr::Range() const {
  Rational lo = 0, hi = 0;
  for (const auto& [k, c] : coeffs) {
    if (c.Sign() > 0) {
      hi += c;
    } else {
      lo += c;
    }
  }
  return {lo, hi};
}

std::string PayoffExpr::ToString() const {
  if (IsVariable()) return variable;
  if (coeffs.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [k, c] : coeffs) {
    Rational mag = c.Sign() < 0 ? -c : c;
    if (first) {
      if (c.Sign() < 0) out += "-";
    } else {
      out += c.Sign() < 0 ? " - " : " + ";
    }
    if (mag != 1) out += mag.ToString() + "*";
    out += "u" + std::to_string(k);
    first = false;
  }
  return out;
}

bool operator<(const PayoffExpr& a, const PayoffExpr& b) {
  if (a.variable != b.variable) return a.variable < b.variable;
  if (a.coeffs.size() != b.coeffs.size()) {
    return a.coeffs.size() < b.coeffs.size();
  }
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    if (a.coeffs[i].first != b.coeffs[i].first) {
      return a.coeffs[i].first < b.coeffs[i].first;
    }
    if (a.coeffs[i].second != b.coeffs[i].second) {
      return a.coeffs[i].second < b.coeffs[i].second;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Term

Term Term::PayoffApp(PayoffExpr p, std::vector<std::string> args) {
  Term t;
  t.kind = TermKind::kPayoff;
  t.payoff = std::move(p);
  t.args = std::move(args);
  return t;
}

Term Term::Loss(int player, std::vector<std::string> args) {
  Term t;
  t.kind = TermKind::kLoss;
  t.player = player;
  t.args = std::move(args);
  return t;
}

Term Term::MaxPayoff(int bound_player, PayoffExpr p,
                     std::vector<std::string> args) {
  Term t;
  t.kind = TermKind::kMaxPayoff;
  t.player = bound_player;
  t.payoff = std::move(p);
  t.args = std::move(args);
  if (bound_player < 1 || bound_player > static_cast<int>(t.args.size())) {
    throw std::out_of_range("max term bound slot out of range");
  }
  t.args[bound_player - 1] = kBoundSlot;
  return t;
}

Term Term::Var(std::string name) {
  Term t;
  t.kind = TermKind::kRealVar;
  t.name = std::move(name);
  return t;
}

Term Term::Const(Rational v) {
  Term t;
  t.kind = TermKind::kConstant;
  t.value = v;
  return t;
}

namespace {

std::string JoinArgs(const std::vector<std::string>& args, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += sep;
    out += args[i];
  }
  return out;
}

std::string PayoffHead(const PayoffExpr& p) {
  if (p.IsVariable() || p.IsBase()) return p.ToString();
  return "(" + p.ToString() + ")";
}

}  // namespace

std::string Term::Key() const {
  switch (kind) {
    case TermKind::kPayoff:
      return "P[" + payoff.ToString() + "](" + JoinArgs(args, ",") + ")";
    case TermKind::kLoss:
      return "L" + std::to_string(player) + "(" + JoinArgs(args, ",") + ")";
    case TermKind::kMaxPayoff:
      return "M" + std::to_string(player) + "[" + payoff.ToString() + "](" +
             JoinArgs(args, ",") + ")";
    case TermKind::kRealVar:
      return "V:" + name;
    case TermKind::kConstant:
      return "C:" + value.ToString();
  }
  return "?";
}

std::string Term::ToString() const {
  switch (kind) {
    case TermKind::kPayoff:
      return PayoffHead(payoff) + "(" + JoinArgs(args, ", ") + ")";
    case TermKind::kLoss:
      return "f" + std::to_string(player) + "(" + JoinArgs(args, ", ") + ")";
    case TermKind::kMaxPayoff:
      return "max " + PayoffHead(payoff) + "(" + JoinArgs(args, ", ") + ")";
    case TermKind::kRealVar:
      return name;
    case TermKind::kConstant:
      return value.ToString();
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Expr construction

namespace {

Expr Node(ExprOp op, std::vector<Expr> kids, bool keep = false) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->kids = std::move(kids);
  n->keep = keep;
  return n;
}

}  // namespace

Expr MakeTerm(Term t) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kTerm;
  n->term = std::move(t);
  return n;
}

Expr MakeConst(Rational v) { return MakeTerm(Term::Const(v)); }
Expr MakeVar(const std::string& name) { return MakeTerm(Term::Var(name)); }

std::optional<Rational> ConstValue(const Expr& e) {
  if (e->op == ExprOp::kTerm && e->term.kind == TermKind::kConstant) {
    return e->term.value;
  }
  return std::nullopt;
}

Expr MakeAdd(Expr a, Expr b) {
  auto ca = ConstValue(a), cb = ConstValue(b);
  if (ca && cb) return MakeConst(*ca + *cb);
  return Node(ExprOp::kAdd, {std::move(a), std::move(b)});
}

Expr MakeSub(Expr a, Expr b) {
  auto ca = ConstValue(a), cb = ConstValue(b);
  if (ca && cb) return MakeConst(*ca - *cb);
  return Node(ExprOp::kSub, {std::move(a), std::move(b)});
}

Expr MakeMul(Expr a, Expr b) {
  auto ca = ConstValue(a), cb = ConstValue(b);
  if (ca && cb) return MakeConst(*ca * *cb);
  return Node(ExprOp::kMul, {std::move(a), std::move(b)});
}

Expr MakeDiv(Expr a, Expr b) {
  auto ca = ConstValue(a), cb = ConstValue(b);
  if (ca && cb && !cb->IsZero()) return MakeConst(*ca / *cb);
  return Node(ExprOp::kDiv, {std::move(a), std::move(b)});
}

Expr MakeNeg(Expr a) {
  if (auto c = ConstValue(a)) return MakeConst(-*c);
  return Node(ExprOp::kNeg, {std::move(a)});
}

Expr MakeMin(std::vector<Expr> kids, bool keep) {
  if (kids.empty()) throw std::invalid_argument("min of empty list");
  if (kids.size() == 1) return kids[0];
  return Node(ExprOp::kMin, std::move(kids), keep);
}

Expr MakeMax(std::vector<Expr> kids, bool keep) {
  if (kids.empty()) throw std::invalid_argument("max of empty list");
  if (kids.size() == 1) return kids[0];
  return Node(ExprOp::kMax, std::move(kids), keep);
}

Expr MakeSelect(Expr cond, Expr then_e, Expr else_e) {
  if (auto c = ConstValue(cond)) return c->Sign() > 0 ? then_e : else_e;
  return Node(ExprOp::kSelect,
              {std::move(cond), std::move(then_e), std::move(else_e)});
}

Expr MakeSum(const std::vector<Expr>& parts) {
  if (parts.empty()) return MakeConst(0);
  Expr acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = MakeAdd(acc, parts[i]);
  return acc;
}

// ---------------------------------------------------------------------------
// Expr printing

namespace {

int Precedence(const Expr& e) {
  switch (e->op) {
    case ExprOp::kAdd:
    case ExprOp::kSub:
      return 1;
    case ExprOp::kMul:
    case ExprOp::kDiv:
      return 2;
    case ExprOp::kNeg:
      return 3;
    case ExprOp::kTerm:
      if (e->term.kind == TermKind::kConstant &&
          (e->term.value.Sign() < 0 || !e->term.value.IsInteger())) {
        return 2;  // prints as "-a" or "a/b"
      }
      return 4;
    default:
      return 4;
  }
}

std::string Wrap(const Expr& e, int min_prec) {
  std::string s = ExprToString(e);
  if (Precedence(e) < min_prec) return "(" + s + ")";
  return s;
}

std::string JoinExprs(const std::vector<Expr>& kids) {
  std::string out;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (i) out += ", ";
    out += ExprToString(kids[i]);
  }
  return out;
}

}  // namespace

std::string ExprToString(const Expr& e) {
  switch (e->op) {
    case ExprOp::kTerm:
      return e->term.ToString();
    case ExprOp::kAdd:
      return Wrap(e->kids[0], 1) + " + " + Wrap(e->kids[1], 2);
    case ExprOp::kSub:
      return Wrap(e->kids[0], 1) + " - " + Wrap(e->kids[1], 2);
    case ExprOp::kMul:
      return Wrap(e->kids[0], 2) + " * " + Wrap(e->kids[1], 3);
    case ExprOp::kDiv:
      return Wrap(e->kids[0], 2) + " / " + Wrap(e->kids[1], 3);
    case ExprOp::kNeg:
      return "-" + Wrap(e->kids[0], 3);
    case ExprOp::kMin:
      return "min(" + JoinExprs(e->kids) + ")";
    case ExprOp::kMax:
      return "max(" + JoinExprs(e->kids) + ")";
    case ExprOp::kSelect:
      return "select(" + JoinExprs(e->kids) + ")";
  }
  return "?";
}

bool ExprEqual(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (a->op != b->op || a->kids.size() != b->kids.size()) return false;
  if (a->op == ExprOp::kTerm) return a->term.Key() == b->term.Key();
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    if (!ExprEqual(a->kids[i], b->kids[i])) return false;
  }
  return true;
}

Expr MapTerms(const Expr& e, const std::function<Expr(const Term&)>& fn) {
  if (e->op == ExprOp::kTerm) return fn(e->term);
  std::vector<Expr> kids;
  kids.reserve(e->kids.size());
  bool changed = false;
  for (const auto& k : e->kids) {
    kids.push_back(MapTerms(k, fn));
    changed = changed || kids.back() != k;
  }
  if (!changed) return e;
  switch (e->op) {
    case ExprOp::kAdd:
      return MakeAdd(kids[0], kids[1]);
    case ExprOp::kSub:
      return MakeSub(kids[0], kids[1]);
    case ExprOp::kMul:
      return MakeMul(kids[0], kids[1]);
    case ExprOp::kDiv:
      return MakeDiv(kids[0], kids[1]);
    case ExprOp::kNeg:
      return MakeNeg(kids[0]);
    case ExprOp::kMin:
      return MakeMin(std::move(kids), e->keep);
    case ExprOp::kMax:
      return MakeMax(std::move(kids), e->keep);
    case ExprOp::kSelect:
      return MakeSelect(kids[0], kids[1], kids[2]);
    case ExprOp::kTerm:
      break;
  }
  return e;
}

void VisitTerms(const Expr& e, const std::function<void(const Term&)>& fn) {
  if (e->op == ExprOp::kTerm) {
    fn(e->term);
    return;
  }
  for (const auto& k : e->kids) VisitTerms(k, fn);
}

bool ContainsMinMax(const Expr& e) {
  if (e->op == ExprOp::kMin || e->op == ExprOp::kMax) return true;
  for (const auto& k : e->kids) {
    if (ContainsMinMax(k)) return true;
  }
  return false;
}

Expr ExpandLinear(const Expr& e) {
  return MapTerms(e, [](const Term& t) -> Expr {
    if (t.kind != TermKind::kPayoff || t.payoff.IsVariable() ||
        t.payoff.IsBase()) {
      return MakeTerm(t);
    }
    std::vector<Expr> parts;
    for (const auto& [k, c] : t.payoff.coeffs) {
      Expr base = MakeTerm(Term::PayoffApp(PayoffExpr::Base(k), t.args));
      parts.push_back(c == 1 ? base : MakeMul(MakeConst(c), base));
    }
    if (parts.empty()) return MakeConst(0);
    return MakeSum(parts);
  });
}

const char* CmpOpSymbol(CmpOp op) {
  switch (op) {
    case CmpOp::kLe:
      return "<=";
    case CmpOp::kGe:
      return ">=";
    case CmpOp::kEq:
      return "=";
    case CmpOp::kLt:
      return "<";
    case CmpOp::kGt:
      return ">";
  }
  return "?";
}

std::string ComparisonToString(const Comparison& c) {
  return ExprToString(c.lhs) + " " + CmpOpSymbol(c.op) + " " +
         ExprToString(c.rhs);
}

bool ComparisonHolds(const Comparison& c, double lhs, double rhs, double tol) {
  switch (c.op) {
    case CmpOp::kLe:
    case CmpOp::kLt:
      return lhs <= rhs + tol;
    case CmpOp::kGe:
    case CmpOp::kGt:
      return lhs + tol >= rhs;
    case CmpOp::kEq:
      return std::fabs(lhs - rhs) <= tol;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Atoms and formulas

std::string AtomToString(const AtomicProperty& a) {
  std::string out;
  if (!a.exists.empty()) {
    out += "exists ";
    for (std::size_t i = 0; i < a.exists.size(); ++i) {
      if (i) out += ", ";
      out += a.exists[i].name + " in [" + a.exists[i].lo.ToString() + ", " +
             a.exists[i].hi.ToString() + "]";
    }
    out += " . ";
  }
  if (!a.forall_strategies.empty() || !a.forall_payoffs.empty()) {
    out += "forall ";
    bool first = true;
    for (const auto& b : a.forall_strategies) {
      if (!first) out += ", ";
      out += b.name + ": Strategy" + std::to_string(b.player);
      first = false;
    }
    for (const auto& u : a.forall_payoffs) {
      if (!first) out += ", ";
      out += u + ": Payoff";
      first = false;
    }
    out += " . ";
  }
  // A two-link chain a <= b <= c prints in chained form.
  if (a.body.size() == 2 && a.body[0].op == a.body[1].op &&
      (a.body[0].op == CmpOp::kLe || a.body[0].op == CmpOp::kGe) &&
      ExprEqual(a.body[0].rhs, a.body[1].lhs)) {
    return out + ComparisonToString(a.body[0]) + " " +
           CmpOpSymbol(a.body[1].op) + " " + ExprToString(a.body[1].rhs);
  }
  for (std::size_t i = 0; i < a.body.size(); ++i) {
    if (i) out += " and ";
    out += ComparisonToString(a.body[i]);
  }
  return out;
}

Formula MakeAtom(AtomicProperty a) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::kAtom;
  n->atom = std::move(a);
  return n;
}

Formula MakeAnd(std::vector<Formula> kids) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::kAnd;
  n->kids = std::move(kids);
  return n;
}

Formula MakeOr(std::vector<Formula> kids) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::kOr;
  n->kids = std::move(kids);
  return n;
}

Formula MakeTrue() { return MakeAnd({}); }

Formula Flatten(const Formula& f) {
  if (f->kind == FormulaKind::kAtom) return f;
  std::vector<Formula> kids;
  for (const auto& k : f->kids) {
    Formula fk = Flatten(k);
    if (fk->kind == f->kind) {
      for (const auto& g : fk->kids) kids.push_back(g);
    } else if (f->kind == FormulaKind::kAnd && fk->kind == FormulaKind::kOr &&
               fk->kids.size() == 1) {
      kids.push_back(fk->kids[0]);
    } else {
      kids.push_back(fk);
    }
  }
  if (kids.size() == 1) return kids[0];
  return f->kind == FormulaKind::kAnd ? MakeAnd(std::move(kids))
                                      : MakeOr(std::move(kids));
}

void VisitAtoms(const Formula& f,
                const std::function<void(const AtomicProperty&)>& fn) {
  if (f->kind == FormulaKind::kAtom) {
    fn(f->atom);
    return;
  }
  for (const auto& k : f->kids) VisitAtoms(k, fn);
}

Formula MapAtoms(const Formula& f,
                 const std::function<Formula(const AtomicProperty&)>& fn) {
  if (f->kind == FormulaKind::kAtom) return fn(f->atom);
  std::vector<Formula> kids;
  kids.reserve(f->kids.size());
  for (const auto& k : f->kids) kids.push_back(MapAtoms(k, fn));
  return f->kind == FormulaKind::kAnd ? MakeAnd(std::move(kids))
                                      : MakeOr(std::move(kids));
}

std::size_t CountAtoms(const Formula& f) {
  std::size_t n = 0;
  VisitAtoms(f, [&](const AtomicProperty&) { ++n; });
  return n;
}

std::string FormulaToString(const Formula& f, int indent) {
  std::string pad(indent * 2, ' ');
  if (f->kind == FormulaKind::kAtom) return pad + AtomToString(f->atom) + "\n";
  std::string out = pad + (f->kind == FormulaKind::kAnd ? "and" : "or") + "\n";
  for (const auto& k : f->kids) out += FormulaToString(k, indent + 1);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

Term SubstituteTerm(const Term& t, const Substitution& s) {
  Term out = t;
  for (auto& a : out.args) {
    auto it = s.strategies.find(a);
    if (it != s.strategies.end()) a = it->second;
  }
  if ((t.kind == TermKind::kPayoff || t.kind == TermKind::kMaxPayoff) &&
      t.payoff.IsVariable()) {
    auto it = s.payoffs.find(t.payoff.variable);
    if (it != s.payoffs.end()) out.payoff = it->second;
  }
  return out;
}

Expr SubstituteExpr(const Expr& e, const Substitution& s) {
  return MapTerms(e, [&](const Term& t) -> Expr {
    if (t.kind == TermKind::kRealVar) {
      auto it = s.reals.find(t.name);
      if (it != s.reals.end()) return it->second;
      return MakeTerm(t);
    }
    return MakeTerm(SubstituteTerm(t, s));
  });
}

Comparison SubstituteComparison(const Comparison& c, const Substitution& s) {
  Comparison out = c;
  out.lhs = SubstituteExpr(c.lhs, s);
  out.rhs = SubstituteExpr(c.rhs, s);
  return out;
}

AtomicProperty SubstituteAtom(const AtomicProperty& a, const Substitution& s) {
  Substitution local = s;
  for (const auto& b : a.exists) local.reals.erase(b.name);
  for (const auto& b : a.forall_strategies) local.strategies.erase(b.name);
  for (const auto& u : a.forall_payoffs) local.payoffs.erase(u);
  AtomicProperty out = a;
  for (auto& c : out.body) c = SubstituteComparison(c, local);
  return out;
}

Formula SubstituteFormula(const Formula& f, const Substitution& s) {
  return MapAtoms(f, [&](const AtomicProperty& a) {
    return MakeAtom(SubstituteAtom(a, s));
  });
}

}  // namespace legone
