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

#include "legone/eval.h"

#include <cmath>
#include <stdexcept>

namespace legone {

double EvaluateExpr(const Expr& e, const std::function<double(const Term&)>& leaf) {
  switch (e->op) {
    case ExprOp::kTerm:
      if (e->term.kind == TermKind::kConstant) return e->term.value.ToDouble();
      return leaf(e->term);
    case ExprOp::kAdd:
      return EvaluateExpr(e->kids[0], leaf) + EvaluateExpr(e->kids[1], leaf);
    case ExprOp::kSub:
      return EvaluateExpr(e->kids[0], leaf) - EvaluateExpr(e->kids[1], leaf);
    case ExprOp::kMul:
      return EvaluateExpr(e->kids[0], leaf) * EvaluateExpr(e->kids[1], leaf);
    case ExprOp::kDiv:
      return EvaluateExpr(e->kids[0], leaf) / EvaluateExpr(e->kids[1], leaf);
    case ExprOp::kNeg:
      return -EvaluateExpr(e->kids[0], leaf);
    case ExprOp::kMin:
    case ExprOp::kMax: {
      double best = EvaluateExpr(e->kids[0], leaf);
      for (std::size_t i = 1; i < e->kids.size(); ++i) {
        double v = EvaluateExpr(e->kids[i], leaf);
        best = e->op == ExprOp::kMin ? std::min(best, v) : std::max(best, v);
      }
      return best;
    }
    case ExprOp::kSelect:
      return EvaluateExpr(e->kids[0], leaf) > 0 ? EvaluateExpr(e->kids[1], leaf)
                                                : EvaluateExpr(e->kids[2], leaf);
  }
  return 0;
}

double EvaluateExpr(const Expr& e, const std::map<std::string, double>& reals) {
  return EvaluateExpr(e, [&](const Term& t) {
    if (t.kind != TermKind::kRealVar) {
      throw std::invalid_argument("cannot evaluate term " + t.ToString());
    }
    auto it = reals.find(t.name);
    if (it == reals.end()) {
      throw std::invalid_argument("no value for variable '" + t.name + "'");
    }
    return it->second;
  });
}

CompiledExpr CompiledExpr::Compile(
    const Expr& e, const std::function<int(const std::string&)>& index_of) {
  CompiledExpr c;
  c.Add(e, index_of);
  return c;
}

int CompiledExpr::Add(const Expr& e,
                      const std::function<int(const std::string&)>& index_of) {
  Node n;
  n.op = e->op;
  if (e->op == ExprOp::kTerm) {
    if (e->term.kind == TermKind::kConstant) {
      n.value = e->term.value.ToDouble();
    } else if (e->term.kind == TermKind::kRealVar) {
      n.var = index_of(e->term.name);
      if (n.var < 0) {
        throw std::invalid_argument("unknown variable '" + e->term.name + "'");
      }
    } else {
      throw std::invalid_argument("cannot compile term " + e->term.ToString());
    }
  } else {
    std::vector<int> kid_ids;
    for (const auto& k : e->kids) kid_ids.push_back(Add(k, index_of));
    n.first_kid = static_cast<int>(kids_.size());
    n.kid_count = static_cast<int>(kid_ids.size());
    kids_.insert(kids_.end(), kid_ids.begin(), kid_ids.end());
  }
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

void CompiledExpr::Forward(const std::vector<double>& x,
                           std::vector<double>& v) const {
  v.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const int* k = kids_.data() + n.first_kid;
    switch (n.op) {
      case ExprOp::kTerm:
        v[i] = n.var >= 0 ? x[n.var] : n.value;
        break;
      case ExprOp::kAdd:
        v[i] = v[k[0]] + v[k[1]];
        break;
      case ExprOp::kSub:
        v[i] = v[k[0]] - v[k[1]];
        break;
      case ExprOp::kMul:
        v[i] = v[k[0]] * v[k[1]];
        break;
      case ExprOp::kDiv:
        v[i] = v[k[0]] / v[k[1]];
        break;
      case ExprOp::kNeg:
        v[i] = -v[k[0]];
        break;
      case ExprOp::kMin: {
        double b = v[k[0]];
        for (int j = 1; j < n.kid_count; ++j) b = std::min(b, v[k[j]]);
        v[i] = b;
        break;
      }
      case ExprOp::kMax: {
        double b = v[k[0]];
        for (int j = 1; j < n.kid_count; ++j) b = std::max(b, v[k[j]]);
        v[i] = b;
        break;
      }
      case ExprOp::kSelect:
        v[i] = v[k[0]] > 0 ? v[k[1]] : v[k[2]];
        break;
    }
  }
}

double CompiledExpr::Value(const std::vector<double>& x) const {
  thread_local std::vector<double> vals;
  Forward(x, vals);
  return vals.back();
}

double CompiledExpr::ValueAndGradient(const std::vector<double>& x, int nvars,
                                      std::vector<double>& grad) const {
  thread_local std::vector<double> vals;
  thread_local std::vector<double> adj;
  Forward(x, vals);
  grad.assign(nvars, 0.0);
  adj.assign(nodes_.size(), 0.0);
  adj.back() = 1.0;
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    const double a = adj[i];
    if (a == 0) continue;
    const Node& n = nodes_[i];
    const int* k = kids_.data() + n.first_kid;
    switch (n.op) {
      case ExprOp::kTerm:
        if (n.var >= 0) grad[n.var] += a;
        break;
      case ExprOp::kAdd:
        adj[k[0]] += a;
        adj[k[1]] += a;
        break;
      case ExprOp::kSub:
        adj[k[0]] += a;
        adj[k[1]] -= a;
        break;
      case ExprOp::kMul:
        adj[k[0]] += a * vals[k[1]];
        adj[k[1]] += a * vals[k[0]];
        break;
      case ExprOp::kDiv: {
        const double d = vals[k[1]];
        adj[k[0]] += a / d;
        adj[k[1]] -= a * vals[k[0]] / (d * d);
        break;
      }
      case ExprOp::kNeg:
        adj[k[0]] -= a;
        break;
      case ExprOp::kMin:
      case ExprOp::kMax: {
        int best = k[0];
        for (int j = 1; j < n.kid_count; ++j) {
          if (n.op == ExprOp::kMin ? vals[k[j]] < vals[best]
                                   : vals[k[j]] > vals[best]) {
            best = k[j];
          }
        }
        adj[best] += a;
        break;
      }
      case ExprOp::kSelect:
        adj[vals[k[0]] > 0 ? k[1] : k[2]] += a;
        break;
    }
  }
  return vals.back();
}

namespace {

bool AddScaled(const Expr& e, double scale,
               const std::function<int(const std::string&)>& index_of,
               AffineForm& out) {
  switch (e->op) {
    case ExprOp::kTerm:
      if (e->term.kind == TermKind::kConstant) {
        out.constant += scale * e->term.value.ToDouble();
        return true;
      }
      if (e->term.kind == TermKind::kRealVar) {
        int idx = index_of(e->term.name);
        if (idx < 0) return false;
        out.coefs[idx] += scale;
        return true;
      }
      return false;
    case ExprOp::kAdd:
      return AddScaled(e->kids[0], scale, index_of, out) &&
             AddScaled(e->kids[1], scale, index_of, out);
    case ExprOp::kSub:
      return AddScaled(e->kids[0], scale, index_of, out) &&
             AddScaled(e->kids[1], -scale, index_of, out);
    case ExprOp::kNeg:
      return AddScaled(e->kids[0], -scale, index_of, out);
    case ExprOp::kMul: {
      auto c0 = ConstValue(e->kids[0]);
      if (c0) return AddScaled(e->kids[1], scale * c0->ToDouble(), index_of, out);
      auto c1 = ConstValue(e->kids[1]);
      if (c1) return AddScaled(e->kids[0], scale * c1->ToDouble(), index_of, out);
      return false;
    }
    case ExprOp::kDiv: {
      auto c1 = ConstValue(e->kids[1]);
      if (!c1 || c1->IsZero()) return false;
      return AddScaled(e->kids[0], scale / c1->ToDouble(), index_of, out);
    }
    case ExprOp::kMin:
    case ExprOp::kMax:
    case ExprOp::kSelect:
      if (auto c = ConstValue(e)) {
        out.constant += scale * c->ToDouble();
        return true;
      }
      return false;
  }
  return false;
}

}  // namespace

std::optional<AffineForm> ExtractAffine(
    const Expr& e, const std::function<int(const std::string&)>& index_of) {
  AffineForm f;
  if (!AddScaled(e, 1.0, index_of, f)) return std::nullopt;
  for (auto it = f.coefs.begin(); it != f.coefs.end();) {
    it = it->second == 0 ? f.coefs.erase(it) : std::next(it);
  }
  return f;
}

}  // namespace legone
