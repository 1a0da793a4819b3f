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

#include "legone/tactics.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <stdexcept>

#include "legone/json_io.h"

namespace legone {
namespace {

// Calls `fn` once per assignment of the binders to universe strategies of the
// matching player. Returns false when some binder has nothing to range over.
bool ForEachAssignment(const std::vector<StrategyBinder>& binders,
                       const StrategyUniverse& universe,
                       const std::function<void(const Substitution&)>& fn) {
  for (const auto& b : binders) {
    if (b.player < 1 || b.player > static_cast<int>(universe.size()) ||
        universe[b.player - 1].empty()) {
      return false;
    }
  }
  Substitution s;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == binders.size()) {
      fn(s);
      return;
    }
    for (const auto& name : universe[binders[k].player - 1]) {
      s.strategies[binders[k].name] = name;
      rec(k + 1);
    }
  };
  rec(0);
  return true;
}

int CountOccurrences(const AtomicProperty& a, const std::string& name) {
  int n = 0;
  for (const auto& c : a.body) {
    for (const Expr* side : {&c.lhs, &c.rhs}) {
      VisitTerms(*side, [&](const Term& t) {
        for (const auto& arg : t.args) n += arg == name;
      });
    }
  }
  return n;
}

bool OccursInPayoffSlot(const AtomicProperty& a, const StrategyBinder& x) {
  bool ok = false;
  for (const auto& c : a.body) {
    for (const Expr* side : {&c.lhs, &c.rhs}) {
      VisitTerms(*side, [&](const Term& t) {
        if (t.kind == TermKind::kPayoff &&
            static_cast<int>(t.args.size()) >= x.player &&
            t.args[x.player - 1] == x.name) {
          ok = true;
        }
      });
    }
  }
  return ok;
}

AtomicProperty Ground(const AtomicProperty& a, const Substitution& s) {
  AtomicProperty out = a;
  out.forall_strategies.clear();
  for (auto& c : out.body) {
    c = SubstituteComparison(c, s);
    c.lhs = ExpandLinear(c.lhs);
    c.rhs = ExpandLinear(c.rhs);
  }
  return out;
}

std::string Sanitize(const std::string& name) {
  std::string out;
  for (char ch : name) {
    out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') ? ch : '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
    out = "v" + out;
  }
  return out;
}

}  // namespace

Formula Instantiate(const AtomicProperty& atom, const StrategyUniverse& universe,
                    const std::vector<PayoffExpr>& payoff_set,
                    InstantiationStats* stats) {
  std::vector<AtomicProperty> stage{atom};
  for (const auto& u : atom.forall_payoffs) {
    std::vector<AtomicProperty> next;
    for (const auto& a : stage) {
      for (const auto& p : payoff_set) {
        Substitution s;
        s.payoffs[u] = p;
        AtomicProperty b = a;
        b.forall_payoffs.erase(
            std::find(b.forall_payoffs.begin(), b.forall_payoffs.end(), u));
        for (auto& c : b.body) c = SubstituteComparison(c, s);
        next.push_back(std::move(b));
      }
    }
    stage = std::move(next);
  }

  std::vector<Formula> out;
  std::set<std::string> seen;
  auto emit = [&](AtomicProperty a, std::size_t* counter) {
    std::string key = AtomToString(a);
    if (!seen.insert(key).second) return;
    if (counter) ++*counter;
    out.push_back(MakeAtom(std::move(a)));
  };
  std::size_t p1 = 0, p2 = 0;
  for (const auto& a : stage) {
    bool ok = ForEachAssignment(a.forall_strategies, universe,
                                [&](const Substitution& s) {
                                  emit(Ground(a, s), &p1);
                                });
    if (!ok && stats) {
      stats->warnings.push_back("quantifier over a player without strategies in " +
                                AtomToString(a));
    }
    for (std::size_t t = 0; t < a.forall_strategies.size(); ++t) {
      const StrategyBinder x = a.forall_strategies[t];
      if (CountOccurrences(a, x.name) != 1 || !OccursInPayoffSlot(a, x)) continue;
      std::vector<StrategyBinder> others;
      for (std::size_t k = 0; k < a.forall_strategies.size(); ++k) {
        if (k != t) others.push_back(a.forall_strategies[k]);
      }
      ForEachAssignment(others, universe, [&](const Substitution& s) {
        AtomicProperty b = a;
        b.forall_strategies.clear();
        for (auto& c : b.body) {
          c = SubstituteComparison(c, s);
          auto lift = [&](const Term& term) -> Expr {
            if (term.kind == TermKind::kPayoff &&
                term.args[x.player - 1] == x.name) {
              return MakeTerm(Term::MaxPayoff(x.player, term.payoff, term.args));
            }
            return MakeTerm(term);
          };
          c.lhs = ExpandLinear(MapTerms(c.lhs, lift));
          c.rhs = ExpandLinear(MapTerms(c.rhs, lift));
        }
        emit(std::move(b), &p2);
      });
    }
  }
  if (stats) {
    stats->procedure1 += p1;
    stats->procedure2 += p2;
  }
  return MakeAnd(std::move(out));
}

Formula InstantiateFormula(const Formula& f, const StrategyUniverse& universe,
                           const std::vector<PayoffExpr>& payoff_set,
                           InstantiationStats* stats) {
  return MapAtoms(f, [&](const AtomicProperty& a) {
    return Instantiate(a, universe, payoff_set, stats);
  });
}

const AbstractVariable* AbstractSystem::Find(const std::string& name) const {
  for (const auto& v : variables) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

AbstractSystem Forget(const Formula& instantiated, const Expr& objective,
                      const ForgetOptions& options) {
  AbstractSystem sys;
  sys.player_count = options.player_count;

  std::map<std::string, RealBinder> binders;
  std::set<std::string> real_names;
  auto collect_reals = [&](const Expr& e) {
    VisitTerms(e, [&](const Term& t) {
      if (t.kind == TermKind::kRealVar && t.name != kDeltaName) {
        real_names.insert(t.name);
      }
    });
  };
  VisitAtoms(instantiated, [&](const AtomicProperty& a) {
    if (!a.IsQuantifierFree()) {
      throw std::invalid_argument("forgetting requires instantiated atoms: " +
                                  AtomToString(a));
    }
    for (const auto& b : a.exists) {
      binders[b.name] = b;
      real_names.insert(b.name);
    }
    for (const auto& c : a.body) {
      collect_reals(c.lhs);
      collect_reals(c.rhs);
    }
  });
  collect_reals(objective);

  std::set<std::string> taken;
  std::map<std::string, std::string> real_rename;
  for (const auto& n : real_names) {
    std::string s = Sanitize(n);
    while (taken.count(s)) s += "_";
    taken.insert(s);
    real_rename[n] = s;
  }

  std::map<std::string, std::string> by_key;
  int counter = 0;
  auto variable_for = [&](const Term& t) -> std::string {
    std::string key = t.Key();
    auto it = by_key.find(key);
    if (it != by_key.end()) return it->second;
    AbstractVariable v;
    v.origin = t;
    if (t.kind == TermKind::kRealVar) {
      v.name = real_rename.at(t.name);
      auto b = binders.find(t.name);
      auto box = options.real_boxes.find(t.name);
      if (b != binders.end()) {
        v.lo = b->second.lo;
        v.hi = b->second.hi;
        v.existential = true;
      } else if (box != options.real_boxes.end()) {
        v.lo = box->second.first;
        v.hi = box->second.second;
      } else {
        v.has_box = false;
      }
    } else {
      do {
        v.name = "a" + std::to_string(++counter);
      } while (taken.count(v.name));
      taken.insert(v.name);
      if (t.kind == TermKind::kLoss) {
        v.lo = 0;
        v.hi = 1;
      } else if (t.payoff.IsVariable()) {
        v.has_box = false;
        sys.warnings.push_back("uninstantiated payoff variable in " + t.ToString());
      } else {
        auto [lo, hi] = t.payoff.Range();
        v.lo = lo;
        v.hi = hi;
      }
    }
    by_key[key] = v.name;
    sys.variables.push_back(v);
    return v.name;
  };
  auto rewrite = [&](const Expr& e) {
    return MapTerms(e, [&](const Term& t) -> Expr {
      if (t.kind == TermKind::kConstant) return MakeTerm(t);
      if (t.kind == TermKind::kRealVar && t.name == kDeltaName) {
        return MakeTerm(t);
      }
      return MakeVar(variable_for(t));
    });
  };

  sys.structure = MapAtoms(instantiated, [&](const AtomicProperty& a) {
    AtomicProperty out = a;
    for (auto& b : out.exists) b.name = real_rename.at(b.name);
    for (auto& c : out.body) {
      c.lhs = rewrite(c.lhs);
      c.rhs = rewrite(c.rhs);
    }
    return MakeAtom(std::move(out));
  });
  sys.objective = rewrite(objective);
  // Binders that never occur in a body still become variables.
  for (const auto& [name, b] : binders) variable_for(Term::Var(name));
  bool delta = false;
  VisitAtoms(sys.structure, [&](const AtomicProperty& a) {
    for (const auto& c : a.body) {
      for (const Expr* side : {&c.lhs, &c.rhs}) {
        VisitTerms(*side, [&](const Term& t) {
          delta = delta || (t.kind == TermKind::kRealVar && t.name == kDeltaName);
        });
      }
    }
  });
  sys.delta_flag = delta;
  return sys;
}

AbstractSystem Abstract(const EncodedProgram& enc, InstantiationStats* stats) {
  InstantiationStats local;
  Formula inst =
      InstantiateFormula(enc.phi, enc.universe, enc.payoff_set, &local);
  ForgetOptions opts;
  opts.player_count = enc.player_count;
  AbstractSystem sys = Forget(inst, enc.goal.objective, opts);
  sys.delta_flag = sys.delta_flag || enc.delta_flag;
  sys.warnings.insert(sys.warnings.begin(), local.warnings.begin(),
                      local.warnings.end());
  if (stats) {
    stats->procedure1 += local.procedure1;
    stats->procedure2 += local.procedure2;
    stats->warnings.insert(stats->warnings.end(), local.warnings.begin(),
                           local.warnings.end());
  }
  return sys;
}

nlohmann::json AbstractSystemToJson(const AbstractSystem& sys) {
  using nlohmann::json;
  json vars = json::array();
  for (const auto& v : sys.variables) {
    json jv;
    jv["name"] = v.name;
    jv["origin"] = v.origin.ToString();
    jv["existential"] = v.existential;
    if (v.has_box) {
      jv["box"] = json::array({v.lo.ToString(), v.hi.ToString()});
    } else {
      jv["box"] = nullptr;
    }
    vars.push_back(jv);
  }
  json j;
  j["players"] = sys.player_count;
  j["variables"] = vars;
  j["structure"] = FormulaToJson(sys.structure);
  j["objective"] = ExprToJson(sys.objective);
  j["delta"] = sys.delta_flag;
  j["warnings"] = sys.warnings;
  return j;
}

}  // namespace legone
