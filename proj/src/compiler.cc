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

#include "legone/compiler.h"

#include <functional>
#include <map>
#include <set>

#include "legone/json_io.h"

namespace legone {
namespace {

using Conj = std::vector<Comparison>;
using Dnf = std::vector<Conj>;

Dnf Product(const Dnf& a, const Dnf& b, std::size_t cap) {
  if (a.size() * b.size() > cap) {
    throw CompileError("DisjunctExplosion",
                       "case splitting exceeds " + std::to_string(cap) +
                           " disjuncts");
  }
  Dnf out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) {
      Conj c = x;
      c.insert(c.end(), y.begin(), y.end());
      out.push_back(std::move(c));
    }
  }
  return out;
}

void AppendCapped(Dnf& out, Dnf more, std::size_t cap) {
  if (out.size() + more.size() > cap) {
    throw CompileError("DisjunctExplosion",
                       "case splitting exceeds " + std::to_string(cap) +
                           " disjuncts");
  }
  for (auto& c : more) out.push_back(std::move(c));
}

Expr Rebuild(const Expr& e, std::vector<Expr> kids) {
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

Expr ReplaceNode(const Expr& e, const ExprNode* target, const Expr& repl) {
  if (e.get() == target) return repl;
  if (e->op == ExprOp::kTerm) return e;
  std::vector<Expr> kids;
  bool changed = false;
  for (const auto& k : e->kids) {
    kids.push_back(ReplaceNode(k, target, repl));
    changed = changed || kids.back() != k;
  }
  return changed ? Rebuild(e, std::move(kids)) : e;
}

enum class SplitMode { kConj, kDisj, kGeneral };

struct Site {
  const ExprNode* node;
  SplitMode mode;
};

int SignOf(const Rational& r) { return r.Sign(); }

// Collects min/max nodes with their polarity in an expression that is
// required to be large (pol = +1) or small (pol = -1).
void FindSites(const Expr& e, int pol, std::vector<Site>& out) {
  switch (e->op) {
    case ExprOp::kTerm:
      return;
    case ExprOp::kAdd:
      FindSites(e->kids[0], pol, out);
      FindSites(e->kids[1], pol, out);
      return;
    case ExprOp::kSub:
      FindSites(e->kids[0], pol, out);
      FindSites(e->kids[1], -pol, out);
      return;
    case ExprOp::kNeg:
      FindSites(e->kids[0], -pol, out);
      return;
    case ExprOp::kMul: {
      auto c0 = ConstValue(e->kids[0]), c1 = ConstValue(e->kids[1]);
      if (c0) {
        FindSites(e->kids[1], pol * SignOf(*c0), out);
      } else if (c1) {
        FindSites(e->kids[0], pol * SignOf(*c1), out);
      } else {
        FindSites(e->kids[0], 0, out);
        FindSites(e->kids[1], 0, out);
      }
      return;
    }
    case ExprOp::kDiv: {
      auto c1 = ConstValue(e->kids[1]);
      FindSites(e->kids[0], c1 ? pol * SignOf(*c1) : 0, out);
      FindSites(e->kids[1], 0, out);
      return;
    }
    case ExprOp::kMin:
    case ExprOp::kMax: {
      bool is_max = e->op == ExprOp::kMax;
      SplitMode mode;
      if (pol == 0) {
        mode = SplitMode::kGeneral;
      } else if ((is_max && pol < 0) || (!is_max && pol > 0)) {
        mode = SplitMode::kConj;
      } else {
        mode = SplitMode::kDisj;
      }
      out.push_back({e.get(), mode});
      for (const auto& k : e->kids) FindSites(k, pol, out);
      return;
    }
    case ExprOp::kSelect:
      FindSites(e->kids[0], 0, out);
      FindSites(e->kids[1], pol, out);
      FindSites(e->kids[2], pol, out);
      return;
  }
}

const Site* PickSite(const std::vector<Site>& sites) {
  for (const auto& s : sites) {
    if (s.mode == SplitMode::kConj) return &s;
  }
  for (const auto& s : sites) {
    if (!s.node->keep) return &s;
  }
  return nullptr;
}

Comparison Le(Expr l, Expr r, const Origin& o) {
  Comparison c;
  c.lhs = std::move(l);
  c.op = CmpOp::kLe;
  c.rhs = std::move(r);
  c.origin = o;
  return c;
}

// DNF of `l <= r` with min/max removed where allowed.
Dnf SplitLe(const Expr& l, const Expr& r, const Origin& o, std::size_t cap) {
  std::vector<Site> sites;
  FindSites(r, +1, sites);
  FindSites(l, -1, sites);
  const Site* site = PickSite(sites);
  if (!site) return {{Le(l, r, o)}};
  const ExprNode* node = site->node;
  const bool is_max = node->op == ExprOp::kMax;
  auto with = [&](const Expr& k) {
    return SplitLe(ReplaceNode(l, node, k), ReplaceNode(r, node, k), o, cap);
  };
  Dnf out;
  switch (site->mode) {
    case SplitMode::kConj:
      out = {{}};
      for (const auto& k : node->kids) out = Product(out, with(k), cap);
      return out;
    case SplitMode::kDisj:
      for (const auto& k : node->kids) AppendCapped(out, with(k), cap);
      return out;
    case SplitMode::kGeneral:
      for (std::size_t j = 0; j < node->kids.size(); ++j) {
        Dnf branch = with(node->kids[j]);
        for (std::size_t m = 0; m < node->kids.size(); ++m) {
          if (m == j) continue;
          Dnf order = is_max ? SplitLe(node->kids[m], node->kids[j], o, cap)
                             : SplitLe(node->kids[j], node->kids[m], o, cap);
          branch = Product(branch, order, cap);
        }
        AppendCapped(out, std::move(branch), cap);
      }
      return out;
  }
  return out;
}

struct ObjectivePiece {
  Conj extra;
  Expr objective;
};

std::vector<ObjectivePiece> SplitObjective(const Expr& obj, std::size_t cap) {
  std::vector<Site> sites;
  FindSites(obj, +1, sites);
  const Site* site = nullptr;
  for (const auto& s : sites) {
    if (!s.node->keep) {
      site = &s;
      break;
    }
  }
  if (!site) return {{{}, obj}};
  const ExprNode* node = site->node;
  const bool is_max = node->op == ExprOp::kMax;
  std::vector<ObjectivePiece> out;
  for (std::size_t j = 0; j < node->kids.size(); ++j) {
    Dnf order = {{}};
    if (site->mode != SplitMode::kDisj) {
      for (std::size_t m = 0; m < node->kids.size(); ++m) {
        if (m == j) continue;
        order = Product(order,
                        is_max ? SplitLe(node->kids[m], node->kids[j], {}, cap)
                               : SplitLe(node->kids[j], node->kids[m], {}, cap),
                        cap);
      }
    }
    for (auto& piece : SplitObjective(ReplaceNode(obj, node, node->kids[j]), cap)) {
      for (const auto& conj : order) {
        ObjectivePiece p;
        p.extra = conj;
        p.extra.insert(p.extra.end(), piece.extra.begin(), piece.extra.end());
        p.objective = piece.objective;
        out.push_back(std::move(p));
        if (out.size() > cap) {
          throw CompileError("DisjunctExplosion",
                             "objective splitting exceeds " +
                                 std::to_string(cap) + " pieces");
        }
      }
    }
  }
  return out;
}

Expr ZeroDelta(const Expr& e) {
  return Simplify(MapTerms(e, [](const Term& t) -> Expr {
    if (t.kind == TermKind::kRealVar && t.name == kDeltaName) {
      return MakeConst(0);
    }
    return MakeTerm(t);
  }));
}

void CollectVars(const Expr& e, std::set<std::string>& out) {
  VisitTerms(e, [&](const Term& t) {
    if (t.kind == TermKind::kRealVar) out.insert(t.name);
  });
}

CmpOp ParseOp(const std::string& s) {
  if (s == "<=") return CmpOp::kLe;
  if (s == ">=") return CmpOp::kGe;
  if (s == "=") return CmpOp::kEq;
  if (s == "<") return CmpOp::kLt;
  if (s == ">") return CmpOp::kGt;
  throw std::invalid_argument("unknown comparison operator '" + s + "'");
}

}  // namespace

Expr Simplify(const Expr& e) {
  if (e->op == ExprOp::kTerm) return e;
  std::vector<Expr> kids;
  for (const auto& k : e->kids) kids.push_back(Simplify(k));
  auto is = [](const Expr& x, int v) {
    auto c = ConstValue(x);
    return c && *c == Rational(v);
  };
  switch (e->op) {
    case ExprOp::kAdd:
      if (is(kids[0], 0)) return kids[1];
      if (is(kids[1], 0)) return kids[0];
      break;
    case ExprOp::kSub:
      if (is(kids[1], 0)) return kids[0];
      if (is(kids[0], 0)) return Simplify(MakeNeg(kids[1]));
      break;
    case ExprOp::kMul:
      if (is(kids[0], 0) || is(kids[1], 0)) return MakeConst(0);
      if (is(kids[0], 1)) return kids[1];
      if (is(kids[1], 1)) return kids[0];
      break;
    case ExprOp::kDiv:
      if (is(kids[1], 1)) return kids[0];
      break;
    case ExprOp::kNeg:
      if (kids[0]->op == ExprOp::kNeg) return kids[0]->kids[0];
      break;
    default:
      break;
  }
  bool changed = false;
  for (std::size_t i = 0; i < kids.size(); ++i) changed = changed || kids[i] != e->kids[i];
  return changed ? Rebuild(e, std::move(kids)) : e;
}

AbstractSystem EliminateExistentials(const AbstractSystem& sys) {
  AbstractSystem out = sys;
  out.structure = MapAtoms(sys.structure, [&](const AtomicProperty& a) {
    AtomicProperty b = a;
    for (const auto& e : a.exists) {
      const AbstractVariable* v = sys.Find(e.name);
      if (!v || !v->has_box) {
        throw CompileError("MissingBox",
                           "existential variable '" + e.name + "' has no box");
      }
    }
    b.exists.clear();
    return MakeAtom(std::move(b));
  });
  return out;
}

DnfResult ToDnfIndexed(const Formula& f, std::size_t cap) {
  DnfResult res;
  std::function<std::vector<std::vector<int>>(const Formula&)> rec =
      [&](const Formula& g) -> std::vector<std::vector<int>> {
    switch (g->kind) {
      case FormulaKind::kAtom: {
        res.atoms.push_back(g->atom);
        return {{static_cast<int>(res.atoms.size()) - 1}};
      }
      case FormulaKind::kAnd: {
        std::vector<std::vector<int>> acc = {{}};
        for (const auto& k : g->kids) {
          auto part = rec(k);
          if (acc.size() * part.size() > cap) {
            throw CompileError("DisjunctExplosion",
                               "DNF exceeds " + std::to_string(cap) + " disjuncts");
          }
          std::vector<std::vector<int>> next;
          for (const auto& x : acc) {
            for (const auto& y : part) {
              auto z = x;
              z.insert(z.end(), y.begin(), y.end());
              next.push_back(std::move(z));
            }
          }
          acc = std::move(next);
        }
        return acc;
      }
      case FormulaKind::kOr: {
        std::vector<std::vector<int>> acc;
        for (const auto& k : g->kids) {
          auto part = rec(k);
          acc.insert(acc.end(), part.begin(), part.end());
          if (acc.size() > cap) {
            throw CompileError("DisjunctExplosion",
                               "DNF exceeds " + std::to_string(cap) + " disjuncts");
          }
        }
        return acc;
      }
    }
    return {};
  };
  res.disjuncts = rec(f);
  return res;
}

std::vector<std::vector<Comparison>> ToDnf(const Formula& f, std::size_t cap) {
  DnfResult d = ToDnfIndexed(f, cap);
  std::vector<std::vector<Comparison>> out;
  for (const auto& ids : d.disjuncts) {
    std::vector<Comparison> conj;
    for (int id : ids) {
      for (const auto& c : d.atoms[id].body) conj.push_back(c);
    }
    out.push_back(std::move(conj));
  }
  return out;
}

bool EvaluateFormula(const Formula& f, const std::vector<bool>& atom_values) {
  std::size_t next = 0;
  std::function<bool(const Formula&)> rec = [&](const Formula& g) -> bool {
    switch (g->kind) {
      case FormulaKind::kAtom:
        return atom_values.at(next++);
      case FormulaKind::kAnd: {
        bool v = true;
        for (const auto& k : g->kids) v = rec(k) && v;
        return v;
      }
      case FormulaKind::kOr: {
        bool v = false;
        for (const auto& k : g->kids) v = rec(k) || v;
        return v;
      }
    }
    return false;
  };
  return rec(f);
}

bool EvaluateDnf(const DnfResult& dnf, const std::vector<bool>& atom_values) {
  for (const auto& conj : dnf.disjuncts) {
    bool all = true;
    for (int id : conj) all = all && atom_values.at(id);
    if (all) return true;
  }
  return false;
}

std::vector<std::vector<Comparison>> SplitComparison(const Comparison& c,
                                                     std::size_t cap) {
  Expr l = c.lhs, r = c.rhs;
  switch (c.op) {
    case CmpOp::kLe:
    case CmpOp::kLt:
      return SplitLe(l, r, c.origin, cap);
    case CmpOp::kGe:
    case CmpOp::kGt:
      return SplitLe(r, l, c.origin, cap);
    case CmpOp::kEq:
      if (!ContainsMinMax(l) && !ContainsMinMax(r)) return {{c}};
      return Product(SplitLe(l, r, c.origin, cap), SplitLe(r, l, c.origin, cap),
                     cap);
  }
  return {{c}};
}

int OptimizationProblem::IndexOf(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

OptimizationProblem BuildProblem(const AbstractSystem& input,
                                 const BuildOptions& options) {
  AbstractSystem sys = EliminateExistentials(input);
  const std::size_t cap = options.disjunct_cap;
  DnfResult dnf = ToDnfIndexed(sys.structure, cap);

  OptimizationProblem prob;
  prob.delta_flag = sys.delta_flag;
  prob.dnf_disjuncts = dnf.disjuncts.size();
  prob.objective = ZeroDelta(sys.objective);

  std::vector<ObjectivePiece> pieces =
      options.split_minmax ? SplitObjective(prob.objective, cap)
                           : std::vector<ObjectivePiece>{{{}, prob.objective}};

  // Per-atom case splits are shared by every disjunct that uses the atom.
  std::map<int, Dnf> atom_split;
  auto split_atom = [&](int id) -> const Dnf& {
    auto it = atom_split.find(id);
    if (it != atom_split.end()) return it->second;
    Dnf acc = {{}};
    for (const auto& raw : dnf.atoms[id].body) {
      Comparison c = raw;
      c.lhs = ZeroDelta(c.lhs);
      c.rhs = ZeroDelta(c.rhs);
      if (c.op == CmpOp::kLt) c.op = CmpOp::kLe;
      if (c.op == CmpOp::kGt) c.op = CmpOp::kGe;
      Dnf parts = options.split_minmax ? SplitComparison(c, cap) : Dnf{{c}};
      acc = Product(acc, parts, cap);
    }
    return atom_split.emplace(id, std::move(acc)).first->second;
  };

  std::size_t total = 0;
  for (std::size_t di = 0; di < dnf.disjuncts.size(); ++di) {
    Dnf conj = {{}};
    for (int id : dnf.disjuncts[di]) conj = Product(conj, split_atom(id), cap);
    for (std::size_t ci = 0; ci < conj.size(); ++ci) {
      for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
        if (++total > cap) {
          throw CompileError("DisjunctExplosion",
                             "problem exceeds " + std::to_string(cap) +
                                 " disjuncts");
        }
        Disjunct d;
        d.dnf_index = static_cast<int>(di);
        d.objective = pieces[pi].objective;
        d.label = "D" + std::to_string(di + 1);
        if (conj.size() > 1) d.label += "." + std::to_string(ci + 1);
        if (pieces.size() > 1) d.label += "/g" + std::to_string(pi + 1);
        std::set<std::string> seen;
        bool infeasible = false;
        auto add = [&](const Comparison& c) {
          auto lc = ConstValue(c.lhs), rc = ConstValue(c.rhs);
          if (lc && rc) {
            if (!ComparisonHolds(c, lc->ToDouble(), rc->ToDouble(), 0.0)) {
              infeasible = true;
            }
            return;
          }
          if (seen.insert(ComparisonToString(c)).second) {
            d.constraints.push_back(c);
          }
        };
        for (const auto& c : conj[ci]) add(c);
        for (const auto& c : pieces[pi].extra) add(c);
        if (infeasible) {
          ++prob.trivially_infeasible;
          continue;
        }
        prob.disjuncts.push_back(std::move(d));
      }
    }
  }

  std::set<std::string> used;
  for (const auto& d : prob.disjuncts) {
    CollectVars(d.objective, used);
    for (const auto& c : d.constraints) {
      CollectVars(c.lhs, used);
      CollectVars(c.rhs, used);
    }
  }
  for (const auto& v : sys.variables) {
    if (!v.has_box) {
      if (used.count(v.name)) {
        throw CompileError("UnboundedVariable",
                           "variable '" + v.name + "' (" + v.origin.ToString() +
                               ") has no box");
      }
      continue;
    }
    prob.variables.push_back(
        {v.name, v.lo.ToDouble(), v.hi.ToDouble(), v.origin.ToString()});
  }
  for (const auto& n : used) {
    if (prob.IndexOf(n) < 0) {
      throw CompileError("UnboundedVariable", "variable '" + n + "' is undeclared");
    }
  }
  return prob;
}

nlohmann::json ProblemToJson(const OptimizationProblem& p) {
  using nlohmann::json;
  json vars = json::array();
  for (const auto& v : p.variables) {
    vars.push_back({{"name", v.name}, {"lo", v.lo}, {"hi", v.hi}, {"origin", v.origin}});
  }
  json ds = json::array();
  for (const auto& d : p.disjuncts) {
    json cs = json::array();
    for (const auto& c : d.constraints) cs.push_back(ComparisonToJson(c));
    ds.push_back({{"label", d.label},
                  {"dnf_index", d.dnf_index},
                  {"objective", ExprToJson(d.objective)},
                  {"constraints", cs}});
  }
  json j;
  j["name"] = p.name;
  j["sense"] = "maximize";
  j["delta"] = p.delta_flag;
  j["objective"] = ExprToJson(p.objective);
  j["variables"] = vars;
  j["disjuncts"] = ds;
  return j;
}

OptimizationProblem ProblemFromJson(const nlohmann::json& j) {
  OptimizationProblem p;
  p.name = j.value("name", "");
  p.delta_flag = j.value("delta", false);
  p.objective = ExprFromJson(j.at("objective"));
  for (const auto& v : j.at("variables")) {
    p.variables.push_back({v.at("name"), v.at("lo"), v.at("hi"), v.value("origin", "")});
  }
  for (const auto& jd : j.at("disjuncts")) {
    Disjunct d;
    d.label = jd.value("label", "");
    d.dnf_index = jd.value("dnf_index", 0);
    d.objective = ExprFromJson(jd.at("objective"));
    for (const auto& jc : jd.at("constraints")) {
      Comparison c;
      c.op = ParseOp(jc.at(0));
      c.lhs = ExprFromJson(jc.at(1));
      c.rhs = ExprFromJson(jc.at(2));
      d.constraints.push_back(c);
    }
    p.disjuncts.push_back(std::move(d));
  }
  p.dnf_disjuncts = p.disjuncts.size();
  return p;
}

}  // namespace legone
