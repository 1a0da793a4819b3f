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

#include "legone/solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "disjunct_model.h"
#include "seed_mix.h"

namespace legone {
namespace internal {

double DisjunctModel::Objective(const std::vector<double>& x) const {
  if (affine_objective) {
    double v = affine_objective->constant;
    for (const auto& [j, a] : affine_objective->coefs) v += a * x[j];
    return v;
  }
  double v = kInf;
  for (const auto& p : pieces) v = std::min(v, p.Value(x));
  return v;
}

double DisjunctModel::Violation(const std::vector<double>& x,
                                double* max_violation) const {
  double sum = 0, worst = 0;
  auto add = [&](double v) {
    if (std::isnan(v)) v = kInf;
    if (v > 0) {
      sum += v;
      worst = std::max(worst, v);
    }
  };
  for (int j = 0; j < n; ++j) {
    add(lb[j] - x[j]);
    add(x[j] - ub[j]);
  }
  for (const auto& r : linear) {
    double s = 0;
    for (const auto& [j, a] : r.coefs) s += a * x[j];
    add(r.lo - s);
    add(s - r.hi);
  }
  for (const auto& r : nonlinear) {
    double s = r.c.Value(x);
    if (std::isnan(s)) {
      add(kInf);
      continue;
    }
    add(r.lo - s);
    add(s - r.hi);
  }
  if (max_violation) *max_violation = worst;
  return sum;
}

namespace {

void FlattenMin(const Expr& e, std::vector<Expr>& out) {
  if (e->op == ExprOp::kMin) {
    for (const auto& k : e->kids) FlattenMin(k, out);
  } else {
    out.push_back(e);
  }
}

}  // namespace

DisjunctModel BuildModel(const OptimizationProblem& problem, std::size_t index,
                         bool presolve) {
  const Disjunct& d = problem.disjuncts.at(index);
  DisjunctModel m;
  m.n = static_cast<int>(problem.variables.size());
  for (const auto& v : problem.variables) {
    m.lb.push_back(v.lo);
    m.ub.push_back(v.hi);
  }
  auto index_of = [&](const std::string& name) { return problem.IndexOf(name); };
  std::map<std::vector<std::pair<int, double>>, std::size_t> seen;
  constexpr double kEps = 1e-12;
  for (const auto& c : d.constraints) {
    Expr diff = MakeSub(c.lhs, c.rhs);
    double lo = -kInf, hi = kInf;
    switch (c.op) {
      case CmpOp::kLe:
      case CmpOp::kLt:
        hi = 0;
        break;
      case CmpOp::kGe:
      case CmpOp::kGt:
        lo = 0;
        break;
      case CmpOp::kEq:
        lo = hi = 0;
        break;
    }
    auto aff = ExtractAffine(diff, index_of);
    if (!aff) {
      m.nonlinear.push_back({CompiledExpr::Compile(diff, index_of), lo, hi});
      continue;
    }
    lo -= aff->constant;
    hi -= aff->constant;
    if (aff->coefs.empty()) {
      if (lo > kEps || hi < -kEps) m.infeasible = true;
      continue;
    }
    std::vector<std::pair<int, double>> coefs(aff->coefs.begin(), aff->coefs.end());
    if (presolve && coefs.size() == 1) {
      auto [j, a] = coefs[0];
      double l = a > 0 ? lo / a : hi / a;
      double h = a > 0 ? hi / a : lo / a;
      m.lb[j] = std::max(m.lb[j], l);
      m.ub[j] = std::min(m.ub[j], h);
      continue;
    }
    if (presolve) {
      auto it = seen.find(coefs);
      if (it != seen.end()) {
        auto& row = m.linear[it->second];
        row.lo = std::max(row.lo, lo);
        row.hi = std::min(row.hi, hi);
        continue;
      }
      seen[coefs] = m.linear.size();
    }
    m.linear.push_back({std::move(coefs), lo, hi});
  }
  for (int j = 0; j < m.n; ++j) {
    if (m.lb[j] > m.ub[j] + kEps) m.infeasible = true;
    if (m.lb[j] > m.ub[j]) m.lb[j] = m.ub[j];
  }
  for (auto& r : m.linear) {
    if (r.lo > r.hi + kEps) m.infeasible = true;
    if (r.lo > r.hi) r.lo = r.hi;
  }
  m.affine_objective = ExtractAffine(d.objective, index_of);
  if (!m.affine_objective) {
    std::vector<Expr> parts;
    FlattenMin(d.objective, parts);
    for (const auto& p : parts) m.pieces.push_back(CompiledExpr::Compile(p, index_of));
  }
  return m;
}

}  // namespace internal

using internal::BuildModel;
using internal::DisjunctModel;

void SolverConfig::Validate() const {
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be at least 1");
  }
  if (time_limit_seconds < 0) {
    throw std::invalid_argument("time_limit_seconds must not be negative");
  }
}

const char* SolveStatusName(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged:
      return "Converged";
    case SolveStatus::kBoxBoundaryHit:
      return "BoxBoundaryHit";
    case SolveStatus::kInfeasible:
      return "Infeasible";
    case SolveStatus::kFailed:
      return "Failed";
  }
  return "?";
}

std::optional<SolveStatus> ParseSolveStatus(const std::string& s) {
  for (auto st : {SolveStatus::kConverged, SolveStatus::kBoxBoundaryHit,
                  SolveStatus::kInfeasible, SolveStatus::kFailed}) {
    if (s == SolveStatusName(st)) return st;
  }
  return std::nullopt;
}

namespace {

using internal::SplitMix;

LpProblem LinearPart(const DisjunctModel& m) {
  LpProblem lp;
  for (int j = 0; j < m.n; ++j) lp.AddVariable(m.lb[j], m.ub[j]);
  for (const auto& r : m.linear) lp.AddRow(r.coefs, r.lo, r.hi);
  return lp;
}

// Nearest point (in l1) to `target` satisfying the box and the linear rows.
std::optional<std::vector<double>> ProjectLinear(const DisjunctModel& m,
                                                 const std::vector<double>& target) {
  LpProblem lp = LinearPart(m);
  lp.x0.assign(m.n, 0.0);
  for (int j = 0; j < m.n; ++j) {
    lp.x0[j] = std::clamp(target[j], m.lb[j], m.ub[j]);
    int ep = lp.AddVariable(0, kInf, -1);
    int em = lp.AddVariable(0, kInf, -1);
    lp.AddRow({{j, 1.0}, {ep, -1.0}, {em, 1.0}}, target[j], target[j]);
    double gap = target[j] - lp.x0[j];
    lp.x0.push_back(gap < 0 ? -gap : 0);
    lp.x0.push_back(gap > 0 ? gap : 0);
  }
  LpResult r = SolveLp(lp);
  if (r.status != LpStatus::kOptimal) return std::nullopt;
  r.x.resize(m.n);
  return r.x;
}

struct LocalResult {
  std::vector<double> x;
  double value = -kInf;
  double max_violation = kInf;
  bool converged = false;
  int iterations = 0;
};

double Merit(const DisjunctModel& m, const std::vector<double>& x, double mu,
             double* max_violation) {
  double v = m.Violation(x, max_violation);
  double f = m.Objective(x);
  if (std::isnan(f) || std::isnan(v)) return -kInf;
  return f - mu * v;
}

// Trust-region sequential LP on the exact penalty f - mu * violation.
LocalResult LocalSolve(const DisjunctModel& m, std::vector<double> x,
                       const SolverConfig& cfg) {
  LocalResult out;
  const int n = m.n;
  double mu = cfg.penalty_initial;
  double radius = cfg.trust_radius_initial;
  double worst = 0;
  double phi = Merit(m, x, mu, &worst);
  std::vector<double> grad;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    LpProblem lp;
    lp.x0.clear();
    for (int j = 0; j < n; ++j) {
      lp.AddVariable(std::max(m.lb[j], x[j] - radius),
                     std::min(m.ub[j], x[j] + radius));
      lp.x0.push_back(x[j]);
    }
    for (const auto& r : m.linear) lp.AddRow(r.coefs, r.lo, r.hi);
    double model_at_x = 0;
    if (m.affine_objective) {
      for (const auto& [j, a] : m.affine_objective->coefs) lp.c[j] += a;
      model_at_x = m.Objective(x);
    } else {
      const int t = lp.AddVariable(-1e6, 1e6, 1.0);
      double fmin = kInf;
      for (const auto& p : m.pieces) {
        double v = p.ValueAndGradient(x, n, grad);
        fmin = std::min(fmin, v);
        // t - g.x' <= v - g.x
        std::vector<std::pair<int, double>> coefs{{t, 1.0}};
        double rhs = v;
        for (int j = 0; j < n; ++j) {
          if (grad[j] != 0) {
            coefs.push_back({j, -grad[j]});
            rhs -= grad[j] * x[j];
          }
        }
        lp.AddRow(std::move(coefs), -kInf, rhs);
      }
      lp.x0.push_back(fmin);
      model_at_x = fmin;
    }
    double viol_at_x = 0;
    for (const auto& r : m.nonlinear) {
      double v = r.c.ValueAndGradient(x, n, grad);
      std::vector<std::pair<int, double>> coefs;
      double shift = v;
      for (int j = 0; j < n; ++j) {
        if (grad[j] != 0) {
          coefs.push_back({j, grad[j]});
          shift -= grad[j] * x[j];
        }
      }
      // lo <= g.x' + shift - sp + sm <= hi
      if (r.hi < kInf) {
        int sp = lp.AddVariable(0, kInf, -mu);
        coefs.push_back({sp, -1.0});
        double excess = std::max(0.0, v - r.hi);
        lp.x0.push_back(excess);
        viol_at_x += excess;
      }
      if (r.lo > -kInf) {
        int sm = lp.AddVariable(0, kInf, -mu);
        coefs.push_back({sm, 1.0});
        double deficit = std::max(0.0, r.lo - v);
        lp.x0.push_back(deficit);
        viol_at_x += deficit;
      }
      lp.AddRow(std::move(coefs), r.lo - shift, r.hi - shift);
    }
    LpResult res = SolveLp(lp);
    if (res.status != LpStatus::kOptimal) break;
    double model_new = 0;
    if (m.affine_objective) {
      model_new = m.affine_objective->constant;
      for (const auto& [j, a] : m.affine_objective->coefs) model_new += a * res.x[j];
    } else {
      model_new = res.x[n];
    }
    const int first_slack = n + (m.affine_objective ? 0 : 1);
    double slack_sum = 0;
    for (std::size_t k = first_slack; k < res.x.size(); ++k) slack_sum += res.x[k];
    const double pred = (model_new - mu * slack_sum) - (model_at_x - mu * viol_at_x);
    const double scale = std::max(1.0, std::fabs(phi));
    if (!(pred > cfg.tolerance * 1e-2 * scale)) {
      if (worst <= cfg.tolerance) {
        out.converged = true;
        break;
      }
      if (mu * cfg.penalty_growth > cfg.penalty_max) break;
      mu *= cfg.penalty_growth;
      phi = Merit(m, x, mu, &worst);
      continue;
    }
    std::vector<double> xn(res.x.begin(), res.x.begin() + n);
    double worst_new = 0;
    double phi_new = Merit(m, xn, mu, &worst_new);
    double ratio = (phi_new - phi) / pred;
    if (ratio > 0.1) {
      double step = 0;
      for (int j = 0; j < n; ++j) step = std::max(step, std::fabs(xn[j] - x[j]));
      x = std::move(xn);
      phi = phi_new;
      worst = worst_new;
      if (ratio > 0.75 && step > 0.9 * radius) {
        radius = std::min(2 * radius, cfg.trust_radius_max);
      }
    } else {
      radius *= 0.25;
      if (radius < 1e-10) {
        out.converged = worst <= cfg.tolerance;
        break;
      }
    }
  }
  out.iterations = it;
  out.value = m.Objective(x);
  m.Violation(x, &out.max_violation);
  out.x = std::move(x);
  return out;
}

bool PushesAgainstBox(const DisjunctModel& m, const std::vector<double>& x) {
  std::vector<double> grad(m.n, 0.0);
  if (m.affine_objective) {
    for (const auto& [j, a] : m.affine_objective->coefs) grad[j] = a;
  } else {
    int best = 0;
    double v = kInf;
    for (std::size_t k = 0; k < m.pieces.size(); ++k) {
      double pv = m.pieces[k].Value(x);
      if (pv < v) {
        v = pv;
        best = static_cast<int>(k);
      }
    }
    m.pieces[best].ValueAndGradient(x, m.n, grad);
  }
  for (int j = 0; j < m.n; ++j) {
    const double tol = 1e-9 * std::max(1.0, std::fabs(x[j]));
    if (grad[j] > 1e-12 && x[j] >= m.ub[j] - tol) return true;
    if (grad[j] < -1e-12 && x[j] <= m.lb[j] + tol) return true;
  }
  return false;
}

}  // namespace

SolveResult SolveDisjunct(const OptimizationProblem& problem, std::size_t index,
                          const SolverConfig& cfg) {
  cfg.Validate();
  SolveResult out;
  out.label = problem.disjuncts.at(index).label;
  DisjunctModel m = BuildModel(problem, index, true);
  if (m.infeasible) {
    out.status = SolveStatus::kInfeasible;
    out.exact = true;
    return out;
  }
  if (m.IsLinear()) {
    LpProblem lp = LinearPart(m);
    for (const auto& [j, a] : m.affine_objective->coefs) lp.c[j] = a;
    LpResult r = SolveLp(lp);
    out.exact = true;
    out.restarts_used = 1;
    out.iterations = r.iterations;
    if (r.status == LpStatus::kInfeasible) {
      out.status = SolveStatus::kInfeasible;
      return out;
    }
    if (r.status != LpStatus::kOptimal) {
      out.status = SolveStatus::kFailed;
      return out;
    }
    out.point = r.x;
    out.value = m.Objective(r.x);
    m.Violation(r.x, &out.max_violation);
    out.status = PushesAgainstBox(m, r.x) ? SolveStatus::kBoxBoundaryHit
                                          : SolveStatus::kConverged;
    return out;
  }

  std::mt19937_64 rng(SplitMix(cfg.seed ^ SplitMix(index + 1)));
  LocalResult best;
  bool have_feasible = false, have_converged = false;
  double least_violation = kInf;
  std::vector<double> least_violating;
  for (int s = 0; s < cfg.restarts; ++s) {
    std::vector<double> target(m.n);
    for (int j = 0; j < m.n; ++j) {
      if (s == 0) {
        target[j] = 0.5 * (m.lb[j] + m.ub[j]);
      } else {
        std::uniform_real_distribution<double> u(m.lb[j], m.ub[j]);
        target[j] = u(rng);
      }
    }
    auto start = ProjectLinear(m, target);
    if (!start) {
      out.status = SolveStatus::kInfeasible;
      out.exact = true;
      out.restarts_used = s + 1;
      return out;
    }
    LocalResult r = LocalSolve(m, std::move(*start), cfg);
    out.iterations += r.iterations;
    out.restarts_used = s + 1;
    if (r.max_violation < least_violation) {
      least_violation = r.max_violation;
      least_violating = r.x;
    }
    if (r.max_violation > cfg.tolerance) continue;
    // Converged runs outrank unconverged ones; ties go to the larger value.
    bool better = !have_feasible || (r.converged && !have_converged) ||
                  (r.converged == have_converged && r.value > best.value);
    if (better) {
      have_converged = have_converged || r.converged;
      best = std::move(r);
      have_feasible = true;
    }
  }
  if (!have_feasible) {
    out.status = SolveStatus::kInfeasible;
    out.max_violation = least_violation;
    out.point = least_violating;
    return out;
  }
  out.value = best.value;
  out.point = best.x;
  out.max_violation = best.max_violation;
  if (!have_converged) {
    out.status = SolveStatus::kFailed;
  } else {
    out.status = PushesAgainstBox(m, best.x) ? SolveStatus::kBoxBoundaryHit
                                             : SolveStatus::kConverged;
  }
  return out;
}

BoundCertificate SolveBuiltin(const OptimizationProblem& problem,
                              const SolverConfig& cfg) {
  cfg.Validate();
  const auto t0 = std::chrono::steady_clock::now();
  BoundCertificate cert;
  cert.problem = problem.name;
  for (const auto& v : problem.variables) cert.variables.push_back(v.name);
  cert.delta_flag = problem.delta_flag;
  cert.seed = cfg.seed;
  cert.restarts = cfg.restarts;
  cert.trivially_infeasible = problem.trivially_infeasible;
  for (std::size_t i = 0; i < problem.disjuncts.size(); ++i) {
    if (cfg.time_limit_seconds > 0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
            cfg.time_limit_seconds) {
      throw SolverError("Timeout", "analysis exceeded " +
                                       std::to_string(cfg.time_limit_seconds) + " s");
    }
    SolveResult r = SolveDisjunct(problem, i, cfg);
    if (r.status == SolveStatus::kFailed) cert.valid = false;
    if (r.status != SolveStatus::kInfeasible && r.value > cert.bound) {
      cert.bound = r.value;
      cert.best_disjunct = static_cast<int>(i);
    }
    cert.per_disjunct.push_back(std::move(r));
  }
  cert.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cert;
}

std::string BoundCertificate::BoundString(int digits) const {
  if (bound == -kInf) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, bound);
  std::string s = buf;
  if (delta_flag) s += "+δ";
  return s;
}

nlohmann::json CertificateToJson(const BoundCertificate& c) {
  using nlohmann::json;
  auto num = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return v > 0 ? json("inf") : json("-inf");
  };
  json per = json::array();
  for (const auto& r : c.per_disjunct) {
    per.push_back({{"label", r.label},
                   {"value", num(r.value)},
                   {"point", r.point},
                   {"status", SolveStatusName(r.status)},
                   {"iterations", r.iterations},
                   {"restarts_used", r.restarts_used},
                   {"max_violation", num(r.max_violation)},
                   {"exact", r.exact}});
  }
  json j;
  j["problem"] = c.problem;
  j["variables"] = c.variables;
  j["per_disjunct"] = per;
  j["bound"] = num(c.bound);
  j["bound_text"] = c.BoundString();
  j["best_disjunct"] = c.best_disjunct;
  j["delta"] = c.delta_flag;
  j["valid"] = c.valid;
  j["solver"] = c.solver;
  j["seed"] = c.seed;
  j["restarts"] = c.restarts;
  j["trivially_infeasible"] = c.trivially_infeasible;
  j["seconds"] = c.seconds;
  return j;
}

BoundCertificate CertificateFromJson(const nlohmann::json& j) {
  auto num = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>() == "inf" ? kInf : -kInf;
    return v.get<double>();
  };
  BoundCertificate c;
  c.problem = j.value("problem", "");
  c.variables = j.value("variables", std::vector<std::string>{});
  for (const auto& r : j.at("per_disjunct")) {
    SolveResult s;
    s.label = r.value("label", "");
    s.value = num(r.at("value"));
    s.point = r.value("point", std::vector<double>{});
    auto st = ParseSolveStatus(r.at("status").get<std::string>());
    if (!st) throw std::invalid_argument("unknown solve status");
    s.status = *st;
    s.iterations = r.value("iterations", 0);
    s.restarts_used = r.value("restarts_used", 0);
    s.max_violation = num(r.value("max_violation", nlohmann::json(0.0)));
    s.exact = r.value("exact", false);
    c.per_disjunct.push_back(std::move(s));
  }
  c.bound = num(j.at("bound"));
  c.best_disjunct = j.value("best_disjunct", -1);
  c.delta_flag = j.value("delta", false);
  c.valid = j.value("valid", true);
  c.solver = j.value("solver", "builtin");
  c.seed = j.value("seed", std::uint64_t{0});
  c.restarts = j.value("restarts", 0);
  c.trivially_infeasible = j.value("trivially_infeasible", std::size_t{0});
  c.seconds = j.value("seconds", 0.0);
  return c;
}

double MaxViolation(const OptimizationProblem& problem, std::size_t index,
                    const std::vector<double>& x) {
  DisjunctModel m = BuildModel(problem, index, false);
  double worst = 0;
  m.Violation(x, &worst);
  return m.infeasible ? kInf : worst;
}

double ObjectiveValue(const OptimizationProblem& problem, std::size_t index,
                      const std::vector<double>& x) {
  return BuildModel(problem, index, false).Objective(x);
}

}  // namespace legone
