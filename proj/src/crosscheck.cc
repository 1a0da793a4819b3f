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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "disjunct_model.h"
#include "legone/solver.h"

namespace legone {
namespace {

using internal::DisjunctModel;

constexpr double kFeasTol = 1e-7;

bool Feasible(const DisjunctModel& m, const std::vector<double>& x) {
  double worst = 0;
  m.Violation(x, &worst);
  return worst <= kFeasTol;
}

// Basis of the directions that keep every equality row and fixed variable.
Eigen::MatrixXd EqualityNullSpace(const DisjunctModel& m) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : m.linear) {
    if (r.lo != r.hi) continue;
    std::vector<double> a(m.n, 0.0);
    for (const auto& [j, c] : r.coefs) a[j] += c;
    rows.push_back(std::move(a));
  }
  for (int j = 0; j < m.n; ++j) {
    if (m.lb[j] == m.ub[j]) {
      std::vector<double> a(m.n, 0.0);
      a[j] = 1;
      rows.push_back(std::move(a));
    }
  }
  if (rows.empty()) return Eigen::MatrixXd::Identity(m.n, m.n);
  Eigen::MatrixXd a(rows.size(), m.n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < m.n; ++j) a(i, j) = rows[i][j];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-10);
  if (lu.rank() == m.n) return Eigen::MatrixXd(m.n, 0);
  return lu.kernel();
}

// Range of t keeping x + t v inside the box and the inequality rows.
std::pair<double, double> LineRange(const DisjunctModel& m,
                                    const std::vector<double>& x,
                                    const std::vector<double>& v) {
  double lo = -kInf, hi = kInf;
  auto clip = [&](double value, double slope, double low, double high) {
    if (std::fabs(slope) < 1e-14) return;
    double a = (low - value) / slope, b = (high - value) / slope;
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  };
  for (int j = 0; j < m.n; ++j) clip(x[j], v[j], m.lb[j], m.ub[j]);
  for (const auto& r : m.linear) {
    if (r.lo == r.hi) continue;
    double s = 0, ds = 0;
    for (const auto& [j, c] : r.coefs) {
      s += c * x[j];
      ds += c * v[j];
    }
    clip(s, ds, r.lo, r.hi);
  }
  return {std::min(lo, 0.0), std::max(hi, 0.0)};
}

}  // namespace

CrossCheckReport CrossCheck(const OptimizationProblem& problem,
                            const BoundCertificate& cert, std::size_t samples,
                            std::uint64_t seed, double tolerance) {
  CrossCheckReport rep;
  rep.bound = cert.bound;
  const std::size_t nd = problem.disjuncts.size();
  if (nd == 0) return rep;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (std::size_t d = 0; d < nd; ++d) {
    std::size_t budget = samples / nd + (d < samples % nd ? 1 : 0);
    DisjunctModel m = internal::BuildModel(problem, d, false);
    if (m.infeasible || budget == 0) {
      rep.samples += budget;
      continue;
    }
    auto record = [&](const std::vector<double>& x) {
      ++rep.accepted;
      double f = m.Objective(x);
      if (f > rep.max_found) {
        rep.max_found = f;
        rep.witness = x;
        rep.witness_disjunct = static_cast<int>(d);
      }
      if (f > cert.bound + tolerance) ++rep.violations;
    };
    std::vector<std::vector<double>> starts;
    if (d < cert.per_disjunct.size() && !cert.per_disjunct[d].point.empty() &&
        static_cast<int>(cert.per_disjunct[d].point.size()) == m.n &&
        Feasible(m, cert.per_disjunct[d].point)) {
      starts.push_back(cert.per_disjunct[d].point);
    }
    const std::size_t rejection = budget / 10;
    for (std::size_t s = 0; s < rejection; ++s) {
      std::vector<double> x(m.n);
      for (int j = 0; j < m.n; ++j) {
        x[j] = std::uniform_real_distribution<double>(m.lb[j], m.ub[j])(rng);
      }
      ++rep.samples;
      if (Feasible(m, x)) {
        record(x);
        if (starts.size() < 8) starts.push_back(x);
      }
    }
    std::size_t remaining = budget - rejection;
    if (starts.empty()) {
      rep.samples += remaining;
      continue;
    }
    Eigen::MatrixXd basis = EqualityNullSpace(m);
    const std::size_t per_chain = remaining / starts.size();
    for (std::size_t c = 0; c < starts.size(); ++c) {
      std::vector<double> x = starts[c];
      std::size_t steps = c + 1 == starts.size() ? remaining - per_chain * c : per_chain;
      for (std::size_t s = 0; s < steps; ++s) {
        ++rep.samples;
        if (basis.cols() > 0) {
          Eigen::VectorXd g(basis.cols());
          for (int k = 0; k < g.size(); ++k) g[k] = gauss(rng);
          Eigen::VectorXd dir = basis * g;
          double norm = dir.norm();
          if (norm > 0) {
            std::vector<double> v(m.n);
            for (int j = 0; j < m.n; ++j) v[j] = dir[j] / norm;
            auto [tlo, thi] = LineRange(m, x, v);
            for (int attempt = 0; attempt < 30 && thi - tlo > 1e-15; ++attempt) {
              double t = std::uniform_real_distribution<double>(tlo, thi)(rng);
              std::vector<double> y(m.n);
              for (int j = 0; j < m.n; ++j) y[j] = x[j] + t * v[j];
              if (Feasible(m, y)) {
                x = std::move(y);
                break;
              }
              (t > 0 ? thi : tlo) = t;
            }
          }
        }
        record(x);
      }
    }
  }
  return rep;
}

void RequireSound(const CrossCheckReport& report,
                  const OptimizationProblem& problem) {
  if (report.sound()) return;
  std::ostringstream os;
  os << report.violations << " feasible samples exceed the bound "
     << report.bound << "; worst value " << report.max_found;
  if (report.witness_disjunct >= 0) {
    os << " in disjunct "
       << problem.disjuncts[report.witness_disjunct].label << " at {";
    for (std::size_t j = 0; j < report.witness.size(); ++j) {
      os << (j ? ", " : "") << problem.variables[j].name << ": "
         << report.witness[j];
    }
    os << "}";
  }
  throw SolverError("SoundnessViolation", os.str());
}

}  // namespace legone
