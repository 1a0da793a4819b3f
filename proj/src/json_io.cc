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

#include "legone/json_io.h"

#include <stdexcept>

namespace legone {

using nlohmann::json;

json TermToJson(const Term& t) {
  switch (t.kind) {
    case TermKind::kPayoff:
      return json::array({"payoff", t.payoff.ToString(), t.args});
    case TermKind::kLoss:
      return json::array({"loss", t.player, t.args});
    case TermKind::kMaxPayoff:
      return json::array({"maxpayoff", t.player, t.payoff.ToString(), t.args});
    case TermKind::kRealVar:
      return json::array({"var", t.name});
    case TermKind::kConstant:
      return json::array({"const", t.value.ToString()});
  }
  return nullptr;
}

namespace {

const char* OpName(ExprOp op) {
  switch (op) {
    case ExprOp::kAdd:
      return "add";
    case ExprOp::kSub:
      return "sub";
    case ExprOp::kMul:
      return "mul";
    case ExprOp::kDiv:
      return "div";
    case ExprOp::kNeg:
      return "neg";
    case ExprOp::kMin:
      return "min";
    case ExprOp::kMax:
      return "max";
    case ExprOp::kSelect:
      return "select";
    case ExprOp::kTerm:
      return "term";
  }
  return "?";
}

}  // namespace

json ExprToJson(const Expr& e) {
  if (e->op == ExprOp::kTerm) return TermToJson(e->term);
  json out = json::array({OpName(e->op)});
  for (const auto& k : e->kids) out.push_back(ExprToJson(k));
  return out;
}

Expr ExprFromJson(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_string()) {
    throw std::invalid_argument("malformed expression JSON: " + j.dump());
  }
  const std::string op = j[0];
  if (op == "var") return MakeVar(j.at(1).get<std::string>());
  if (op == "const") {
    return MakeConst(Rational::Parse(j.at(1).get<std::string>()));
  }
  std::vector<Expr> kids;
  for (std::size_t i = 1; i < j.size(); ++i) kids.push_back(ExprFromJson(j[i]));
  auto need = [&](std::size_t n) {
    if (kids.size() != n) {
      throw std::invalid_argument("wrong arity for '" + op + "'");
    }
  };
  if (op == "add") return need(2), MakeAdd(kids[0], kids[1]);
  if (op == "sub") return need(2), MakeSub(kids[0], kids[1]);
  if (op == "mul") return need(2), MakeMul(kids[0], kids[1]);
  if (op == "div") return need(2), MakeDiv(kids[0], kids[1]);
  if (op == "neg") return need(1), MakeNeg(kids[0]);
  if (op == "min") return MakeMin(kids);
  if (op == "max") return MakeMax(kids);
  if (op == "select") return need(3), MakeSelect(kids[0], kids[1], kids[2]);
  throw std::invalid_argument("unsupported expression operator '" + op + "'");
}

json ComparisonToJson(const Comparison& c) {
  return json::array({CmpOpSymbol(c.op), ExprToJson(c.lhs), ExprToJson(c.rhs)});
}

json AtomToJson(const AtomicProperty& a) {
  json j;
  json ex = json::array();
  for (const auto& b : a.exists) {
    ex.push_back({{"name", b.name}, {"lo", b.lo.ToString()}, {"hi", b.hi.ToString()}});
  }
  json fs = json::array();
  for (const auto& b : a.forall_strategies) {
    fs.push_back({{"name", b.name}, {"player", b.player}});
  }
  json body = json::array();
  for (const auto& c : a.body) body.push_back(ComparisonToJson(c));
  j["exists"] = ex;
  j["forall_strategies"] = fs;
  j["forall_payoffs"] = a.forall_payoffs;
  j["body"] = body;
  if (!a.origin.block.empty()) j["origin"] = a.origin.block;
  return j;
}

json FormulaToJson(const Formula& f) {
  switch (f->kind) {
    case FormulaKind::kAtom:
      return json{{"atom", AtomToJson(f->atom)}};
    case FormulaKind::kAnd:
    case FormulaKind::kOr: {
      json kids = json::array();
      for (const auto& k : f->kids) kids.push_back(FormulaToJson(k));
      return json{{f->kind == FormulaKind::kAnd ? "and" : "or", kids}};
    }
  }
  return nullptr;
}

}  // namespace legone
