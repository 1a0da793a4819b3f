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

#include "legone/blocks.h"

#include <algorithm>
#include <cctype>
#include <nlohmann/json.hpp>
#include <set>

namespace legone {
namespace {

std::optional<int> ParseDigit(std::string_view s) {
  if (s.size() != 1 || s[0] < '1' || s[0] > '9') return std::nullopt;
  return s[0] - '0';
}

std::optional<std::pair<int, int>> ParseTwoDigits(std::string_view s) {
  if (s.size() != 2) return std::nullopt;
  auto a = ParseDigit(s.substr(0, 1));
  auto b = ParseDigit(s.substr(1, 1));
  if (!a || !b) return std::nullopt;
  return std::make_pair(*a, *b);
}

bool StartsWith(std::string_view s, std::string_view p) {
  return s.substr(0, p.size()) == p;
}

// Builds a full profile: slots listed in `fixed` take those names, the rest
// are filled in ascending player order from `others`.
std::vector<std::string> Profile(int r,
                                 const std::vector<std::pair<int, std::string>>& fixed,
                                 const std::vector<std::string>& others) {
  std::vector<std::string> out(r);
  std::vector<bool> taken(r, false);
  for (const auto& [p, name] : fixed) {
    out[p - 1] = name;
    taken[p - 1] = true;
  }
  std::size_t next = 0;
  for (int k = 0; k < r; ++k) {
    if (taken[k]) continue;
    if (next >= others.size()) throw BlockError("ArityError", "profile too short");
    out[k] = others[next++];
  }
  if (next != others.size()) throw BlockError("ArityError", "profile too long");
  return out;
}

Expr U(const PayoffExpr& p, std::vector<std::string> args) {
  return MakeTerm(Term::PayoffApp(p, std::move(args)));
}

Expr Ui(int i, std::vector<std::string> args) {
  return U(PayoffExpr::Base(i), std::move(args));
}

Expr F(int i, std::vector<std::string> args) {
  return MakeTerm(Term::Loss(i, std::move(args)));
}

Comparison Cmp(Expr l, CmpOp op, Expr r) {
  Comparison c;
  c.lhs = std::move(l);
  c.op = op;
  c.rhs = std::move(r);
  return c;
}

AtomicProperty Atom(std::vector<StrategyBinder> binders,
                    std::vector<Comparison> body) {
  AtomicProperty a;
  a.forall_strategies = std::move(binders);
  a.body = std::move(body);
  return a;
}

void CheckPlayer(int r, int p) {
  if (p < 1 || p > r) {
    throw BlockError("IndexError", "player index " + std::to_string(p) +
                                       " outside [1," + std::to_string(r) + "]");
  }
}

// Bound strategy variables for every player except those in `skip`.
std::vector<StrategyBinder> OpponentBinders(int r, std::set<int> skip,
                                            const std::string& stem) {
  std::vector<StrategyBinder> out;
  for (int k = 1; k <= r; ++k) {
    if (skip.count(k)) continue;
    out.push_back({k, "$" + stem + std::to_string(k)});
  }
  return out;
}

std::vector<std::string> BinderNames(const std::vector<StrategyBinder>& bs) {
  std::vector<std::string> out;
  for (const auto& b : bs) out.push_back(b.name);
  return out;
}

}  // namespace

std::optional<LibraryRef> ParseLibraryName(std::string_view name) {
  struct Single {
    const char* prefix;
    LibraryKind kind;
  };
  static const Single kSingles[] = {
      {"Random", LibraryKind::kRandom},
      {"BestResponse", LibraryKind::kBestResponse},
      {"UniformMixing", LibraryKind::kUniformMixing},
      {"EqMix", LibraryKind::kUniformMixing},
      {"Mix", LibraryKind::kMix},
  };
  static const Single kPairs[] = {
      {"ZeroSumNE", LibraryKind::kZeroSumNE},
      {"StationaryPoint", LibraryKind::kStationaryPoint},
  };
  if (name == "OptimalMixing") {
    return LibraryRef{LibraryKind::kOptimalMixing, 0, 0, std::string(name)};
  }
  if (name == "IfThenElse") {
    return LibraryRef{LibraryKind::kIfThenElse, 0, 0, std::string(name)};
  }
  for (const auto& s : kSingles) {
    if (StartsWith(name, s.prefix)) {
      if (auto d = ParseDigit(name.substr(std::string_view(s.prefix).size()))) {
        return LibraryRef{s.kind, *d, 0, std::string(name)};
      }
    }
  }
  for (const auto& s : kPairs) {
    if (StartsWith(name, s.prefix)) {
      if (auto d =
              ParseTwoDigits(name.substr(std::string_view(s.prefix).size()))) {
        return LibraryRef{s.kind, d->first, d->second, std::string(name)};
      }
    }
  }
  return std::nullopt;
}

SignatureCheck LibrarySignature(const LibraryRef& ref, int r,
                                const std::vector<BasicType>& arg_types) {
  SignatureCheck out;
  auto fail = [&](std::string code, std::string msg) {
    out.code = std::move(code);
    out.message = std::move(msg);
    return out;
  };
  auto bad_player = [&](int p) {
    return p < 1 || p > r;
  };
  Signature sig;
  switch (ref.kind) {
    case LibraryKind::kRandom:
    case LibraryKind::kBestResponse:
    case LibraryKind::kUniformMixing:
    case LibraryKind::kMix:
      if (bad_player(ref.i)) {
        return fail("UnknownBlock", ref.name + " refers to player " +
                                        std::to_string(ref.i) + " in a " +
                                        std::to_string(r) + "-player program");
      }
      break;
    case LibraryKind::kZeroSumNE:
    case LibraryKind::kStationaryPoint:
      if (bad_player(ref.i) || bad_player(ref.j) || ref.i == ref.j) {
        return fail("UnknownBlock",
                    ref.name + " needs two distinct players in [1," +
                        std::to_string(r) + "]");
      }
      break;
    default:
      break;
  }
  switch (ref.kind) {
    case LibraryKind::kRandom:
      sig.outputs = {BasicType::Strategy(ref.i)};
      break;
    case LibraryKind::kBestResponse:
      for (int k = 1; k <= r; ++k) {
        if (k != ref.i) sig.inputs.push_back(BasicType::Strategy(k));
      }
      sig.outputs = {BasicType::Strategy(ref.i)};
      break;
    case LibraryKind::kZeroSumNE:
      for (int k = 1; k <= r; ++k) {
        if (k != ref.i && k != ref.j) {
          sig.inputs.push_back(BasicType::Strategy(k));
        }
      }
      sig.inputs.push_back(BasicType::Payoff());
      sig.outputs = {BasicType::Strategy(ref.i), BasicType::Strategy(ref.j)};
      break;
    case LibraryKind::kStationaryPoint:
      for (int k = 1; k <= r; ++k) {
        if (k != ref.i && k != ref.j) {
          sig.inputs.push_back(BasicType::Strategy(k));
        }
      }
      sig.outputs = {BasicType::Strategy(ref.i), BasicType::Strategy(ref.j),
                     BasicType::Strategy(ref.i), BasicType::Strategy(ref.j)};
      break;
    case LibraryKind::kUniformMixing:
      if (arg_types.size() < 2) {
        return fail("ArityMismatch",
                    ref.name + " mixes at least 2 strategies, got " +
                        std::to_string(arg_types.size()));
      }
      sig.inputs.assign(arg_types.size(), BasicType::Strategy(ref.i));
      sig.outputs = {BasicType::Strategy(ref.i)};
      break;
    case LibraryKind::kMix:
      sig.inputs = {BasicType::Strategy(ref.i), BasicType::Strategy(ref.i),
                    BasicType::Real()};
      sig.outputs = {BasicType::Strategy(ref.i)};
      break;
    case LibraryKind::kOptimalMixing: {
      std::vector<int> per_player(r + 1, 0);
      for (const auto& t : arg_types) {
        if (!t.IsStrategy() || t.player < 1 || t.player > r) {
          return fail("TypeMismatch",
                      "OptimalMixing takes strategies only, got " + t.ToString());
        }
        ++per_player[t.player];
      }
      for (int k = 1; k <= r; ++k) {
        if (per_player[k] == 0) {
          return fail("ArityMismatch",
                      "OptimalMixing needs at least one strategy of player " +
                          std::to_string(k));
        }
      }
      sig.inputs = arg_types;
      for (int k = 1; k <= r; ++k) sig.outputs.push_back(BasicType::Strategy(k));
      break;
    }
    case LibraryKind::kIfThenElse:
      return fail("BranchingUnsupported",
                  "IfThenElse is not compiled by the automatic pipeline; "
                  "encode one branch with an assumption block");
  }
  out.signature = std::move(sig);
  return out;
}

// ---------------------------------------------------------------------------
// Encodings

Formula InherentFormulas(int r) {
  if (r < 2) throw BlockError("IndexError", "at least two players required");
  std::vector<Formula> atoms;
  for (int i = 1; i <= r; ++i) {
    std::vector<StrategyBinder> all = OpponentBinders(r, {}, "x");
    std::vector<StrategyBinder> opp = OpponentBinders(r, {i}, "x");
    std::vector<std::string> prof = BinderNames(all);
    Expr ui = Ui(i, prof);
    Expr mi = MakeTerm(Term::MaxPayoff(i, PayoffExpr::Base(i), prof));
    auto add = [&](std::vector<StrategyBinder> b, std::vector<Comparison> body,
                   const char* family) {
      AtomicProperty a = Atom(std::move(b), std::move(body));
      a.origin.block = family;
      atoms.push_back(MakeAtom(std::move(a)));
    };
    add(all, {Cmp(MakeConst(0), CmpOp::kLe, ui), Cmp(ui, CmpOp::kLe, MakeConst(1))},
        "inherent:payoff-range");
    add(all, {Cmp(F(i, prof), CmpOp::kEq, MakeSub(mi, ui))},
        "inherent:regret-definition");
    add(all, {Cmp(mi, CmpOp::kGe, ui)}, "inherent:max-dominates");
    add(opp, {Cmp(mi, CmpOp::kLe, MakeConst(1))}, "inherent:max-range");
  }
  return MakeAnd(std::move(atoms));
}

Formula BestResponseEncoding(int r, int i,
                             const std::vector<std::string>& opponents,
                             const std::string& out) {
  CheckPlayer(r, i);
  const std::string z = "$z";
  return MakeAtom(Atom({{i, z}},
                       {Cmp(Ui(i, Profile(r, {{i, z}}, opponents)), CmpOp::kLe,
                            Ui(i, Profile(r, {{i, out}}, opponents)))}));
}

Formula ZeroSumNEEncoding(int r, int i, int j,
                          const std::vector<std::string>& others,
                          const PayoffExpr& u, const std::string& out_i,
                          const std::string& out_j) {
  CheckPlayer(r, i);
  CheckPlayer(r, j);
  if (i == j) throw BlockError("IndexError", "ZeroSumNE needs distinct players");
  const std::string xi = "$xi", yj = "$yj";
  Expr center = U(u, Profile(r, {{i, out_i}, {j, out_j}}, others));
  Formula a = MakeAtom(
      Atom({{i, xi}}, {Cmp(U(u, Profile(r, {{i, xi}, {j, out_j}}, others)),
                           CmpOp::kGe, center)}));
  Formula b = MakeAtom(
      Atom({{j, yj}}, {Cmp(U(u, Profile(r, {{i, out_i}, {j, yj}}, others)),
                           CmpOp::kLe, center)}));
  return MakeAnd({a, b});
}

Formula StationaryPointEncoding(int r, int i, int j,
                                const std::vector<std::string>& others,
                                const std::string& xi, const std::string& xj,
                                const std::string& yi, const std::string& yj,
                                const std::string& rho, bool with_delta) {
  CheckPlayer(r, i);
  CheckPlayer(r, j);
  if (i == j) {
    throw BlockError("IndexError", "StationaryPoint needs distinct players");
  }
  auto P = [&](const std::string& a, const std::string& b) {
    return Profile(r, {{i, a}, {j, b}}, others);
  };
  const std::string xp = "$xi", yp = "$xj";
  std::vector<Formula> parts;
  parts.push_back(MakeAtom(
      Atom({}, {Cmp(F(i, P(xi, xj)), CmpOp::kEq, F(j, P(xi, xj)))})));
  parts.push_back(MakeAtom(Atom(
      {{i, xp}}, {Cmp(Ui(i, P(yi, xj)), CmpOp::kGe, Ui(i, P(xp, xj)))})));
  parts.push_back(MakeAtom(Atom(
      {{j, yp}}, {Cmp(Ui(j, P(xi, yj)), CmpOp::kGe, Ui(j, P(xi, yp)))})));
  Expr rho_e = MakeVar(rho);
  Expr gi = MakeAdd(MakeSub(MakeSub(Ui(i, P(yi, yp)), Ui(i, P(xp, xj))),
                            Ui(i, P(xi, yp))),
                    Ui(i, P(xi, xj)));
  Expr gj = MakeAdd(MakeSub(MakeSub(Ui(j, P(xp, yj)), Ui(j, P(xp, xj))),
                            Ui(j, P(xi, yp))),
                    Ui(j, P(xi, xj)));
  Expr rhs = MakeAdd(MakeMul(rho_e, gi),
                     MakeMul(MakeSub(MakeConst(1), rho_e), gj));
  if (with_delta) rhs = MakeAdd(rhs, MakeVar(kDeltaName));
  AtomicProperty descent =
      Atom({{i, xp}, {j, yp}}, {Cmp(F(i, P(xi, xj)), CmpOp::kLe, rhs)});
  descent.exists.push_back({rho, Rational(0), Rational(1)});
  parts.push_back(MakeAtom(std::move(descent)));
  return MakeAnd(std::move(parts));
}

Formula UniformMixingEncoding(int r, int i,
                              const std::vector<std::string>& parts,
                              const std::string& out) {
  CheckPlayer(r, i);
  if (parts.size() < 2) {
    throw BlockError("ArityError", "uniform mixing needs at least 2 parts");
  }
  Rational w(1, static_cast<std::int64_t>(parts.size()));
  std::vector<StrategyBinder> opp = OpponentBinders(r, {i}, "y");
  std::vector<std::string> opp_names = BinderNames(opp);
  std::vector<Formula> atoms;
  {
    PayoffExpr uvar = PayoffExpr::Variable("$U");
    std::vector<Expr> terms;
    for (const auto& p : parts) {
      terms.push_back(
          MakeMul(MakeConst(w), U(uvar, Profile(r, {{i, p}}, opp_names))));
    }
    AtomicProperty a = Atom(opp, {Cmp(U(uvar, Profile(r, {{i, out}}, opp_names)),
                                      CmpOp::kEq, MakeSum(terms))});
    a.forall_payoffs.push_back("$U");
    atoms.push_back(MakeAtom(std::move(a)));
  }
  for (int j = 1; j <= r; ++j) {
    if (j == i) continue;
    std::vector<Expr> terms;
    for (const auto& p : parts) {
      terms.push_back(
          MakeMul(MakeConst(w), F(j, Profile(r, {{i, p}}, opp_names))));
    }
    atoms.push_back(MakeAtom(Atom(
        opp, {Cmp(MakeSum(terms), CmpOp::kGe,
                  F(j, Profile(r, {{i, out}}, opp_names)))})));
  }
  return MakeAnd(std::move(atoms));
}

Formula MixEncoding(int r, int i, const std::string& a, const std::string& b,
                    const Rational& lambda, const std::string& out) {
  CheckPlayer(r, i);
  if (lambda < 0 || lambda > 1) {
    throw BlockError("RangeError", "mixing coefficient outside [0,1]");
  }
  std::vector<StrategyBinder> opp = OpponentBinders(r, {i}, "y");
  std::vector<std::string> on = BinderNames(opp);
  Expr la = MakeConst(lambda), lb = MakeConst(Rational(1) - lambda);
  std::vector<Formula> atoms;
  PayoffExpr uvar = PayoffExpr::Variable("$U");
  AtomicProperty lin =
      Atom(opp, {Cmp(U(uvar, Profile(r, {{i, out}}, on)), CmpOp::kEq,
                     MakeAdd(MakeMul(la, U(uvar, Profile(r, {{i, a}}, on))),
                             MakeMul(lb, U(uvar, Profile(r, {{i, b}}, on)))))});
  lin.forall_payoffs.push_back("$U");
  atoms.push_back(MakeAtom(std::move(lin)));
  for (int j = 1; j <= r; ++j) {
    if (j == i) continue;
    atoms.push_back(MakeAtom(
        Atom(opp, {Cmp(MakeAdd(MakeMul(la, F(j, Profile(r, {{i, a}}, on))),
                               MakeMul(lb, F(j, Profile(r, {{i, b}}, on)))),
                       CmpOp::kGe, F(j, Profile(r, {{i, out}}, on)))})));
  }
  return MakeAnd(std::move(atoms));
}

Formula IfThenElse(const Expr& a, const Expr& b, const Formula& branch1,
                   const Formula& branch2) {
  AtomicProperty ge = Atom({}, {Cmp(a, CmpOp::kGe, b)});
  ge.origin.block = "IfThenElse";
  AtomicProperty lt = Atom({}, {Cmp(a, CmpOp::kLt, b)});
  lt.origin.block = "IfThenElse";
  return MakeOr({MakeAnd({MakeAtom(std::move(ge)), branch1}),
                 MakeAnd({MakeAtom(std::move(lt)), branch2})});
}

// ---------------------------------------------------------------------------
// Optimal mixing

EdgeBoundSpec EnumerateMixingPolytope(const std::vector<int>& counts) {
  EdgeBoundSpec spec;
  std::size_t nv = 1;
  for (int c : counts) {
    if (c < 1) throw BlockError("ArityError", "empty strategy set for mixing");
    nv *= static_cast<std::size_t>(c);
    if (nv > kMaxMixingVertices) {
      throw BlockError("CapacityError", "mixing polytope exceeds " +
                                            std::to_string(kMaxMixingVertices) +
                                            " vertices");
    }
  }
  const int r = static_cast<int>(counts.size());
  std::vector<int> cur(r, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    spec.vertices.push_back(cur);
    for (int k = r - 1; k >= 0; --k) {
      if (++cur[k] < counts[k]) break;
      cur[k] = 0;
    }
  }
  // Row-major index of a vertex.
  auto index_of = [&](const std::vector<int>& v) {
    std::size_t idx = 0;
    for (int k = 0; k < r; ++k) idx = idx * counts[k] + v[k];
    return static_cast<int>(idx);
  };
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& base = spec.vertices[v];
    for (int k = 0; k < r; ++k) {
      for (int s = base[k] + 1; s < counts[k]; ++s) {
        std::vector<int> other = base;
        other[k] = s;
        spec.edges.push_back({static_cast<int>(v), index_of(other), k + 1});
        if (spec.edges.size() > kMaxMixingEdges) {
          throw BlockError("CapacityError",
                           "mixing polytope exceeds " +
                               std::to_string(kMaxMixingEdges) + " edges");
        }
      }
    }
  }
  return spec;
}

Expr EdgeBound(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  const std::size_t r = a.size();
  std::vector<Expr> candidates;
  candidates.push_back(MakeMax(a, true));
  candidates.push_back(MakeMax(b, true));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      Expr da = MakeSub(a[i], a[j]);
      Expr db = MakeSub(b[i], b[j]);
      Expr crossing = MakeNeg(MakeMul(da, db));
      Expr lambda_raw = MakeDiv(da, MakeSub(da, db));
      Expr lambda =
          MakeMin({MakeConst(1), MakeMax({MakeConst(0), lambda_raw}, true)},
                  true);
      std::vector<Expr> lines;
      for (std::size_t k = 0; k < r; ++k) {
        lines.push_back(MakeAdd(MakeMul(a[k], MakeSub(MakeConst(1), lambda)),
                                MakeMul(b[k], lambda)));
      }
      candidates.push_back(
          MakeSelect(crossing, MakeMax(std::move(lines), true), MakeConst(1)));
    }
  }
  return MakeMin(std::move(candidates), true);
}

double EdgeBoundValue(const std::vector<double>& a,
                      const std::vector<double>& b) {
  const std::size_t r = a.size();
  double best = std::min(*std::max_element(a.begin(), a.end()),
                         *std::max_element(b.begin(), b.end()));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      double da = a[i] - a[j], db = b[i] - b[j];
      if (-(da * db) <= 0) continue;
      double lambda = std::clamp(da / (da - db), 0.0, 1.0);
      double m = -1e300;
      for (std::size_t k = 0; k < r; ++k) {
        m = std::max(m, a[k] * (1 - lambda) + b[k] * lambda);
      }
      best = std::min(best, m);
    }
  }
  return best;
}

Expr OptimalMixingBound(int r,
                        const std::vector<std::vector<std::string>>& strategies) {
  if (static_cast<int>(strategies.size()) != r) {
    throw BlockError("ArityError", "one strategy list per player required");
  }
  std::vector<int> counts;
  for (const auto& s : strategies) counts.push_back(static_cast<int>(s.size()));
  EdgeBoundSpec spec = EnumerateMixingPolytope(counts);
  auto losses = [&](const std::vector<int>& v) {
    std::vector<std::string> prof(r);
    for (int k = 0; k < r; ++k) prof[k] = strategies[k][v[k]];
    std::vector<Expr> out;
    for (int i = 1; i <= r; ++i) out.push_back(F(i, prof));
    return out;
  };
  if (spec.edges.empty()) return MakeMax(losses(spec.vertices[0]), true);
  std::vector<Expr> per_edge;
  per_edge.reserve(spec.edges.size());
  for (const auto& e : spec.edges) {
    per_edge.push_back(
        EdgeBound(losses(spec.vertices[e.from]), losses(spec.vertices[e.to])));
  }
  return MakeMin(std::move(per_edge), true);
}

SourceProgram AutoReturn(const SourceProgram& prog) {
  if (prog.algorithm.return_profile) return prog;
  const int r = prog.player_count;
  std::vector<std::vector<std::string>> per_player(r);
  std::set<std::string> names;
  for (const auto& [name, type] : StrategyVariables(prog)) {
    names.insert(name);
    if (type.IsStrategy() && type.player >= 1 && type.player <= r) {
      per_player[type.player - 1].push_back(name);
    }
  }
  for (int k = 0; k < r; ++k) {
    if (per_player[k].empty()) {
      throw BlockError("NoStrategyForPlayer",
                       "no constructed strategy for player " +
                           std::to_string(k + 1));
    }
  }
  Statement st;
  st.block = "OptimalMixing";
  st.loc = prog.algorithm.return_loc;
  for (int k = 0; k < r; ++k) {
    for (const auto& s : per_player[k]) {
      Argument a;
      a.kind = Argument::Kind::kIdent;
      a.ident = s;
      st.args.push_back(a);
    }
  }
  std::vector<std::string> outs;
  for (int k = 1; k <= r; ++k) {
    std::string name = "mixed" + std::to_string(k);
    while (names.count(name)) name += "_";
    outs.push_back(name);
    st.outputs.push_back(name);
    st.annotations.push_back(BasicType::Strategy(k));
  }
  SourceProgram out = prog;
  out.algorithm.statements.push_back(std::move(st));
  out.algorithm.return_profile = outs;
  return out;
}

std::string BlockManifestJson(int r) {
  using nlohmann::json;
  json blocks = json::array();
  auto sig_json = [](const Signature& s) {
    json in = json::array(), out = json::array();
    for (const auto& t : s.inputs) in.push_back(t.ToString());
    for (const auto& t : s.outputs) out.push_back(t.ToString());
    return json{{"inputs", in}, {"outputs", out}};
  };
  auto add = [&](const std::string& name, const std::vector<BasicType>& args,
                 const std::string& description, const Formula& enc) {
    auto ref = ParseLibraryName(name);
    SignatureCheck sc = LibrarySignature(*ref, r, args);
    json j;
    j["name"] = name;
    j["signature"] = sig_json(*sc.signature);
    j["description"] = description;
    j["encoding"] = enc ? FormulaToString(enc) : "(none)";
    blocks.push_back(j);
  };
  auto opponents = [&](std::set<int> skip) {
    std::vector<std::string> out;
    for (int k = 1; k <= r; ++k) {
      if (!skip.count(k)) out.push_back("x" + std::to_string(k));
    }
    return out;
  };
  for (int i = 1; i <= r; ++i) {
    std::string s = std::to_string(i);
    add("Random" + s, {}, "uniformly random strategy for player " + s, nullptr);
    add("BestResponse" + s, {}, "pure best response of player " + s +
                                    " to the other players' strategies",
        BestResponseEncoding(r, i, opponents({i}), "out"));
    add("UniformMixing" + s,
        {BasicType::Strategy(i), BasicType::Strategy(i)},
        "uniform average of two or more strategies of player " + s +
            " (alias EqMix" + s + ")",
        UniformMixingEncoding(r, i, {"a", "b"}, "out"));
    add("Mix" + s,
        {BasicType::Strategy(i), BasicType::Strategy(i), BasicType::Real()},
        "lam*a + (1-lam)*b for a constant lam in [0,1]",
        MixEncoding(r, i, "a", "b", Rational(1, 2), "out"));
  }
  for (int i = 1; i <= r; ++i) {
    for (int j = 1; j <= r; ++j) {
      if (i == j) continue;
      std::string ij = std::to_string(i) + std::to_string(j);
      add("ZeroSumNE" + ij, {},
          "equilibrium of the zero-sum game with payoff u; player " +
              std::to_string(i) + " minimizes u, player " + std::to_string(j) +
              " maximizes it",
          ZeroSumNEEncoding(r, i, j, opponents({i, j}),
                            PayoffExpr::Variable("u"), "xi", "xj"));
      add("StationaryPoint" + ij, {},
          "stationary point (xi, xj) of max(f_i, f_j) with dual strategies "
          "(yi, yj)",
          StationaryPointEncoding(r, i, j, opponents({i, j}), "xi", "xj", "yi",
                                  "yj", "rho", true));
    }
  }
  {
    std::vector<BasicType> args;
    for (int k = 1; k <= r; ++k) args.push_back(BasicType::Strategy(k));
    add("OptimalMixing", args,
        "profile minimizing the maximum regret over all convex combinations "
        "of the given strategies; encoded as f(out) <= L*",
        nullptr);
  }
  return json{{"players", r}, {"blocks", blocks}}.dump(2);
}

}  // namespace legone
