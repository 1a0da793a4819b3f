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

#include "legone/lp.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace legone {

int LpProblem::AddVariable(double lo, double hi, double cost) {
  lb.push_back(lo);
  ub.push_back(hi);
  c.push_back(cost);
  return n++;
}

void LpProblem::AddRow(std::vector<std::pair<int, double>> coefs, double lo,
                       double hi) {
  rows.push_back({std::move(coefs), lo, hi});
}

const char* LpStatusName(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration-limit";
  }
  return "?";
}

namespace {

constexpr double kPivotTol = 1e-11;

class Simplex {
 public:
  Simplex(int rows, int cols) : m_(rows), n_(cols), t_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  double& T(int i, int j) { return t_[static_cast<std::size_t>(i) * n_ + j]; }

  int m_, n_;
  std::vector<double> t_;     // B^-1 A, row-major
  std::vector<double> beta;   // basic values per row
  std::vector<int> basis;     // column basic in each row
  std::vector<int> row_of;    // row index if basic, else -1
  std::vector<double> x;      // values of nonbasic columns
  std::vector<double> lb, ub, cost;
  std::vector<double> d;      // reduced costs

  void ComputeReducedCosts() {
    d.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) d[j] = cost[j];
    for (int i = 0; i < m_; ++i) {
      double cb = cost[basis[i]];
      if (cb == 0) continue;
      const double* row = &t_[static_cast<std::size_t>(i) * n_];
      for (int j = 0; j < n_; ++j) d[j] -= cb * row[j];
    }
  }

  void Pivot(int r, int q) {
    double* prow = &t_[static_cast<std::size_t>(r) * n_];
    const double inv = 1.0 / prow[q];
    for (int j = 0; j < n_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &t_[static_cast<std::size_t>(i) * n_];
      const double f = row[q];
      if (f == 0) continue;
      for (int j = 0; j < n_; ++j) {
        if (prow[j] != 0) row[j] -= f * prow[j];
      }
      row[q] = 0.0;
    }
    const double fd = d[q];
    if (fd != 0) {
      for (int j = 0; j < n_; ++j) {
        if (prow[j] != 0) d[j] -= fd * prow[j];
      }
      d[q] = 0.0;
    }
  }

  // Returns kOptimal, kUnbounded or kIterationLimit.
  LpStatus Run(const LpOptions& opt, int& iterations) {
    int degenerate = 0;
    while (true) {
      if (iterations >= opt.max_iterations) return LpStatus::kIterationLimit;
      const bool bland = degenerate > 50;
      int q = -1;
      int dir = 0;
      double best = 0;
      for (int j = 0; j < n_; ++j) {
        if (row_of[j] >= 0) continue;
        if (ub[j] - lb[j] <= 0) continue;
        int s = 0;
        if (d[j] > opt.optimality_tol && x[j] < ub[j]) s = 1;
        if (d[j] < -opt.optimality_tol && x[j] > lb[j]) s = -1;
        if (!s) continue;
        double score = std::fabs(d[j]);
        if (bland) {
          q = j;
          dir = s;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
          dir = s;
        }
      }
      if (q < 0) return LpStatus::kOptimal;
      ++iterations;
      double theta = dir > 0 ? ub[q] - x[q] : x[q] - lb[q];
      int leave = -1;
      double leave_piv = 0;
      for (int i = 0; i < m_; ++i) {
        const double a = T(i, q);
        if (std::fabs(a) <= kPivotTol) continue;
        const double rate = -dir * a;
        const int b = basis[i];
        double lim;
        if (rate < 0) {
          if (lb[b] == -kInf) continue;
          lim = (beta[i] - lb[b]) / -rate;
        } else {
          if (ub[b] == kInf) continue;
          lim = (ub[b] - beta[i]) / rate;
        }
        if (lim < 0) lim = 0;
        bool better = lim < theta - 1e-12 ||
                      (lim <= theta + 1e-12 && leave >= 0 &&
                       (bland ? basis[i] < basis[leave]
                              : std::fabs(a) > leave_piv));
        if (leave < 0 && lim <= theta) better = true;
        if (better) {
          theta = lim;
          leave = i;
          leave_piv = std::fabs(a);
        }
      }
      if (theta == kInf) return LpStatus::kUnbounded;
      degenerate = theta <= 1e-12 ? degenerate + 1 : 0;
      for (int i = 0; i < m_; ++i) {
        const double a = T(i, q);
        if (a != 0) beta[i] -= dir * a * theta;
      }
      x[q] += dir * theta;
      if (leave < 0) {
        // Bound flip of the entering variable.
        x[q] = dir > 0 ? ub[q] : lb[q];
        continue;
      }
      const int out = basis[leave];
      const double a = T(leave, q);
      const double rate = -dir * a;
      x[out] = rate < 0 ? lb[out] : ub[out];
      row_of[out] = -1;
      Pivot(leave, q);
      basis[leave] = q;
      row_of[q] = leave;
      beta[leave] = x[q];
    }
  }

  double Value(int j) const { return row_of[j] >= 0 ? beta[row_of[j]] : x[j]; }
};

}  // namespace

LpResult SolveLp(const LpProblem& p, const LpOptions& opt) {
  const int n = p.n;
  const int m = static_cast<int>(p.rows.size());
  if (static_cast<int>(p.c.size()) != n || static_cast<int>(p.lb.size()) != n ||
      static_cast<int>(p.ub.size()) != n) {
    throw std::invalid_argument("LP dimension mismatch");
  }
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    if (p.lb[j] > p.ub[j]) return {LpStatus::kInfeasible, 0, {}, 0};
    double v = p.x0.size() == static_cast<std::size_t>(n) ? p.x0[j] : 0.0;
    x0[j] = std::clamp(v, p.lb[j], p.ub[j]);
  }
  std::vector<double> ax(m, 0.0);
  int n_art = 0;
  std::vector<int> needs_art(m, 0);
  for (int i = 0; i < m; ++i) {
    for (const auto& [j, a] : p.rows[i].coefs) ax[i] += a * x0[j];
    const auto& row = p.rows[i];
    if (row.lo > row.hi) return {LpStatus::kInfeasible, 0, {}, 0};
    if (ax[i] < row.lo - opt.feasibility_tol || ax[i] > row.hi + opt.feasibility_tol) {
      needs_art[i] = 1;
      ++n_art;
    }
  }
  const int cols = n + m + n_art;
  Simplex s(m, cols);
  s.lb.assign(cols, 0.0);
  s.ub.assign(cols, 0.0);
  s.cost.assign(cols, 0.0);
  s.x.assign(cols, 0.0);
  s.row_of.assign(cols, -1);
  s.basis.assign(m, -1);
  s.beta.assign(m, 0.0);
  for (int j = 0; j < n; ++j) {
    s.lb[j] = p.lb[j];
    s.ub[j] = p.ub[j];
    s.x[j] = x0[j];
  }
  int art = n + m;
  for (int i = 0; i < m; ++i) {
    const auto& row = p.rows[i];
    const int sj = n + i;
    s.lb[sj] = row.lo;
    s.ub[sj] = row.hi;
    // Row: a.x - s_i (+ sigma * art) = 0.
    if (!needs_art[i]) {
      // s_i basic: s_i = a.x, so the tableau row is [-a | +1].
      for (const auto& [j, a] : row.coefs) s.T(i, j) -= a;
      s.T(i, sj) = 1.0;
      s.basis[i] = sj;
      s.row_of[sj] = i;
      s.beta[i] = ax[i];
    } else {
      const double v = std::clamp(ax[i], row.lo, row.hi);
      s.x[sj] = v;
      const double sigma = v - ax[i] > 0 ? 1.0 : -1.0;
      // art = sigma * (s - a.x) >= 0; tableau row = (a.x - s + sigma art) / sigma.
      for (const auto& [j, a] : row.coefs) s.T(i, j) += a / sigma;
      s.T(i, sj) = -1.0 / sigma;
      s.T(i, art) = 1.0;
      s.lb[art] = 0.0;
      s.ub[art] = kInf;
      s.cost[art] = -1.0;
      s.basis[i] = art;
      s.row_of[art] = i;
      s.beta[i] = sigma * (v - ax[i]);
      ++art;
    }
  }
  LpResult res;
  if (n_art > 0) {
    s.ComputeReducedCosts();
    LpStatus st = s.Run(opt, res.iterations);
    if (st == LpStatus::kIterationLimit) {
      res.status = st;
      return res;
    }
    double infeas = 0;
    for (int j = n + m; j < cols; ++j) infeas += s.Value(j);
    if (infeas > 1e-7) {
      res.status = LpStatus::kInfeasible;
      return res;
    }
    for (int j = n + m; j < cols; ++j) {
      s.ub[j] = 0.0;
      s.cost[j] = 0.0;
      if (s.row_of[j] < 0) s.x[j] = 0.0;
    }
  }
  for (int j = 0; j < n; ++j) s.cost[j] = p.c[j];
  s.ComputeReducedCosts();
  LpStatus st = s.Run(opt, res.iterations);
  res.status = st;
  res.x.resize(n);
  for (int j = 0; j < n; ++j) {
    res.x[j] = std::clamp(s.Value(j), p.lb[j], p.ub[j]);
  }
  res.objective = 0;
  for (int j = 0; j < n; ++j) res.objective += p.c[j] * res.x[j];
  return res;
}

}  // namespace legone
