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

#include "legone/encode.h"

#include <set>

#include "legone/blocks.h"

namespace legone {
namespace {

std::vector<std::string> IdentArgs(const Statement& st) {
  std::vector<std::string> out;
  for (const auto& a : st.args) {
    if (a.kind == Argument::Kind::kIdent) out.push_back(a.ident);
  }
  return out;
}

const Argument* FirstOf(const Statement& st, Argument::Kind kind) {
  for (const auto& a : st.args) {
    if (a.kind == kind) return &a;
  }
  return nullptr;
}

void RequireOutputs(const Statement& st, std::size_t n) {
  if (st.outputs.size() != n) {
    throw EncodeError("ArityMismatch", st.block + " produces " +
                                           std::to_string(n) + " output(s)");
  }
}

Formula EncodeUserBlock(const SourceProgram& prog, const BlockDecl& b,
                        const Statement& st, int index) {
  if (b.inputs.size() != st.args.size() || b.outputs.size() != st.outputs.size()) {
    throw EncodeError("SubstitutionError",
                      "statement does not match the signature of " + b.name);
  }
  Substitution s;
  for (std::size_t k = 0; k < b.inputs.size(); ++k) {
    const Param& formal = b.inputs[k];
    const Argument& arg = st.args[k];
    if (formal.type.IsStrategy() && arg.kind == Argument::Kind::kIdent) {
      s.strategies[formal.name] = arg.ident;
    } else if (formal.type.kind == TypeKind::kPayoff &&
               arg.kind == Argument::Kind::kPayoff) {
      s.payoffs[formal.name] = arg.payoff;
    } else if (formal.type.kind == TypeKind::kReal &&
               arg.kind == Argument::Kind::kNumber) {
      s.reals[formal.name] = MakeConst(arg.number);
    } else {
      throw EncodeError("SubstitutionError",
                        "cannot bind argument '" + arg.ToString() +
                            "' to parameter '" + formal.name + "' of " + b.name);
    }
  }
  for (std::size_t k = 0; k < b.outputs.size(); ++k) {
    s.strategies[b.outputs[k].name] = st.outputs[k];
  }
  std::set<std::string> program_names;
  for (const auto& other : prog.algorithm.statements) {
    program_names.insert(other.outputs.begin(), other.outputs.end());
  }
  return MapAtoms(b.encoding, [&](const AtomicProperty& a) {
    Substitution local = s;
    AtomicProperty out = a;
    std::set<std::string> bound{kBoundSlot};
    std::set<std::string> bound_payoffs;
    for (const auto& x : a.forall_strategies) {
      local.strategies.erase(x.name);
      bound.insert(x.name);
    }
    for (const auto& u : a.forall_payoffs) {
      local.payoffs.erase(u);
      bound_payoffs.insert(u);
    }
    for (auto& e : out.exists) {
      std::string fresh = FreshRealName(e.name, index);
      local.reals[e.name] = MakeVar(fresh);
      e.name = fresh;
    }
    for (auto& c : out.body) {
      c = SubstituteComparison(c, local);
      for (const Expr* side : {&c.lhs, &c.rhs}) {
        VisitTerms(*side, [&](const Term& t) {
          for (const auto& n : t.args) {
            if (!bound.count(n) && !program_names.count(n)) {
              throw EncodeError("SubstitutionError",
                                "block " + b.name + " refers to undeclared '" +
                                    n + "'");
            }
          }
          if ((t.kind == TermKind::kPayoff || t.kind == TermKind::kMaxPayoff) &&
              t.payoff.IsVariable() && !bound_payoffs.count(t.payoff.variable)) {
            throw EncodeError("SubstitutionError",
                              "block " + b.name + " refers to undeclared payoff '" +
                                  t.payoff.variable + "'");
          }
        });
      }
    }
    return MakeAtom(std::move(out));
  });
}

Formula EncodeLibrary(const SourceProgram& prog, const LibraryRef& ref,
                      const Statement& st, int index,
                      const std::map<std::string, BasicType>& env) {
  const int r = prog.player_count;
  std::vector<std::string> ids = IdentArgs(st);
  switch (ref.kind) {
    case LibraryKind::kRandom:
      RequireOutputs(st, 1);
      return MakeTrue();
    case LibraryKind::kBestResponse:
      RequireOutputs(st, 1);
      return BestResponseEncoding(r, ref.i, ids, st.outputs[0]);
    case LibraryKind::kZeroSumNE: {
      RequireOutputs(st, 2);
      const Argument* u = FirstOf(st, Argument::Kind::kPayoff);
      if (!u) throw EncodeError("TypeMismatch", "ZeroSumNE needs a payoff argument");
      return ZeroSumNEEncoding(r, ref.i, ref.j, ids, u->payoff, st.outputs[0],
                               st.outputs[1]);
    }
    case LibraryKind::kStationaryPoint:
      RequireOutputs(st, 4);
      return StationaryPointEncoding(
          r, ref.i, ref.j, ids, st.outputs[0], st.outputs[1], st.outputs[2],
          st.outputs[3], FreshRealName("rho", index), prog.options.delta_symbolic);
    case LibraryKind::kUniformMixing:
      RequireOutputs(st, 1);
      return UniformMixingEncoding(r, ref.i, ids, st.outputs[0]);
    case LibraryKind::kMix: {
      RequireOutputs(st, 1);
      const Argument* lam = FirstOf(st, Argument::Kind::kNumber);
      if (!lam || ids.size() != 2) {
        throw EncodeError("ArityMismatch", "Mix takes two strategies and a coefficient");
      }
      return MixEncoding(r, ref.i, ids[0], ids[1], lam->number, st.outputs[0]);
    }
    case LibraryKind::kOptimalMixing: {
      RequireOutputs(st, static_cast<std::size_t>(r));
      std::vector<std::vector<std::string>> per_player(r);
      for (const auto& id : ids) {
        auto it = env.find(id);
        if (it == env.end() || !it->second.IsStrategy()) {
          throw EncodeError("TypeMismatch", "'" + id + "' is not a strategy");
        }
        per_player[it->second.player - 1].push_back(id);
      }
      Expr bound = OptimalMixingBound(r, per_player);
      std::vector<Expr> losses;
      for (int i = 1; i <= r; ++i) {
        losses.push_back(MakeTerm(Term::Loss(i, st.outputs)));
      }
      AtomicProperty a;
      a.body.push_back({MakeMax(losses), CmpOp::kLe, bound, {}});
      return MakeAtom(std::move(a));
    }
    case LibraryKind::kIfThenElse:
      throw EncodeError("BranchingUnsupported",
                        "IfThenElse cannot be compiled automatically");
  }
  return MakeTrue();
}

}  // namespace

std::string FreshRealName(const std::string& base, int index) {
  return base + "@" + std::to_string(index + 1);
}

bool MentionsDelta(const Formula& f) {
  bool found = false;
  VisitAtoms(f, [&](const AtomicProperty& a) {
    for (const auto& c : a.body) {
      for (const Expr* side : {&c.lhs, &c.rhs}) {
        VisitTerms(*side, [&](const Term& t) {
          if (t.kind == TermKind::kRealVar && t.name == kDeltaName) found = true;
        });
      }
    }
  });
  return found;
}

Formula EncodeStatement(const SourceProgram& prog, int index) {
  const Statement& st = prog.algorithm.statements.at(index);
  std::map<std::string, BasicType> env;
  for (const auto& [name, type] : StrategyVariables(prog)) env[name] = type;
  Formula f;
  bool approximate = false;
  try {
    if (const BlockDecl* b = FindUserBlock(prog, st.block)) {
      f = EncodeUserBlock(prog, *b, st, index);
      approximate = MentionsDelta(f);
    } else if (auto ref = ParseLibraryName(st.block)) {
      f = EncodeLibrary(prog, *ref, st, index, env);
      approximate = ref->kind == LibraryKind::kStationaryPoint;
    } else {
      throw EncodeError("UnknownBlock", "unknown block '" + st.block + "'");
    }
  } catch (const BlockError& e) {
    throw EncodeError(e.kind(), e.what());
  }
  return MapAtoms(f, [&](const AtomicProperty& a) {
    AtomicProperty out = a;
    out.origin.statement = index;
    out.origin.block = st.block;
    out.origin.approximate = approximate;
    for (auto& c : out.body) c.origin = out.origin;
    return MakeAtom(std::move(out));
  });
}

EncodedProgram EncodeProgram(const SourceProgram& source) {
  SourceProgram prog = source;
  if (prog.options.auto_return_optimal_mixing) {
    try {
      prog = AutoReturn(source);
    } catch (const BlockError& e) {
      throw EncodeError(e.kind(), e.what());
    }
  }
  if (!prog.algorithm.return_profile) {
    throw EncodeError("MissingReturn",
                      "algorithm has no return statement and automatic "
                      "optimal mixing is off");
  }
  const int r = prog.player_count;
  EncodedProgram out;
  out.player_count = r;
  out.parts.push_back(InherentFormulas(r));
  for (std::size_t k = 0; k < prog.algorithm.statements.size(); ++k) {
    out.parts.push_back(EncodeStatement(prog, static_cast<int>(k)));
  }
  out.phi = MakeAnd(out.parts);
  out.goal.profile = *prog.algorithm.return_profile;
  std::vector<Expr> losses;
  for (int i = 1; i <= r; ++i) {
    losses.push_back(MakeTerm(Term::Loss(i, out.goal.profile)));
  }
  out.goal.objective = MakeMax(losses);
  out.universe.assign(r, {});
  for (const auto& [name, type] : StrategyVariables(prog)) {
    if (type.IsStrategy() && type.player <= r) {
      out.universe[type.player - 1].push_back(name);
    }
  }
  for (int i = 1; i <= r; ++i) out.payoff_set.push_back(PayoffExpr::Base(i));
  for (const auto& p : PayoffLiterals(prog)) {
    bool seen = false;
    for (const auto& q : out.payoff_set) seen = seen || q == p;
    if (!seen) out.payoff_set.push_back(p);
  }
  out.delta_flag = MentionsDelta(out.phi);
  return out;
}

}  // namespace legone
