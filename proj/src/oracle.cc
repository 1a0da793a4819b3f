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

#include "legone/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Dense>

#include "legone/blocks.h"
#include "legone/encode.h"
#include "legone/eval.h"
#include "legone/lp.h"
#include "legone/tactics.h"
#include "seed_mix.h"

namespace legone {

// ---------------------------------------------------------------------------
// Games

std::size_t ConcreteGame::ProfileCount() const {
  std::size_t n = 1;
  for (int a : actions) n *= static_cast<std::size_t>(a);
  return n;
}

double ConcreteGame::Payoff(int player, const std::vector<int>& profile) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    idx = idx * static_cast<std::size_t>(actions[k]) + static_cast<std::size_t>(profile[k]);
  }
  return payoffs[player - 1][idx];
}

ConcreteGame ConcreteGame::Constant(const std::vector<int>& actions, double value) {
  ConcreteGame g;
  g.actions = actions;
  g.payoffs.assign(actions.size(), std::vector<double>(g.ProfileCount(), value));
  return g;
}

ConcreteGame ConcreteGame::Uniform(const std::vector<int>& actions, std::mt19937_64& rng) {
  ConcreteGame g = Constant(actions, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& tensor : g.payoffs) {
    for (double& v : tensor) v = unit(rng);
  }
  return g;
}

ConcreteGame ConcreteGame::IdentityLike(const std::vector<int>& actions) {
  ConcreteGame g = Constant(actions, 0);
  std::vector<int> a(actions.size(), 0);
  for (std::size_t idx = 0; idx < g.ProfileCount(); ++idx) {
    bool same = std::all_of(a.begin(), a.end(), [&](int v) { return v == a[0]; });
    for (auto& tensor : g.payoffs) tensor[idx] = same ? 1.0 : 0.0;
    for (int k = static_cast<int>(a.size()) - 1; k >= 0; --k) {
      if (++a[k] < actions[k]) break;
      a[k] = 0;
    }
  }
  return g;
}

ConcreteGame ConcreteGame::DuplicatedRows(const std::vector<int>& actions,
                                          std::mt19937_64& rng) {
  ConcreteGame g = Uniform(actions, rng);
  if (actions.empty() || actions[0] < 2) return g;
  const std::size_t block = g.ProfileCount() / static_cast<std::size_t>(actions[0]);
  for (auto& tensor : g.payoffs) {
    std::copy(tensor.begin(), tensor.begin() + block, tensor.begin() + block);
  }
  return g;
}

nlohmann::json GameToJson(const ConcreteGame& g) {
  return nlohmann::json{{"actions", g.actions}, {"payoffs", g.payoffs}};
}

ConcreteGame GameFromJson(const nlohmann::json& j) {
  ConcreteGame g;
  try {
    g.actions = j.at("actions").get<std::vector<int>>();
    g.payoffs = j.at("payoffs").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw OracleError("InvalidGame", std::string("malformed game: ") + e.what());
  }
  if (g.actions.empty() || g.payoffs.size() != g.actions.size()) {
    throw OracleError("InvalidGame", "one payoff tensor per player required");
  }
  for (int a : g.actions) {
    if (a < 1) throw OracleError("InvalidGame", "every player needs an action");
  }
  for (const auto& t : g.payoffs) {
    if (t.size() != g.ProfileCount()) {
      throw OracleError("InvalidGame", "payoff tensor has the wrong size");
    }
    for (double v : t) {
      if (!(v >= 0 && v <= 1)) throw OracleError("InvalidGame", "payoffs must lie in [0,1]");
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Payoffs under mixed profiles

namespace {

void CheckProfile(const ConcreteGame& g, const std::vector<MixedStrategy>& profile) {
  if (profile.size() != g.actions.size()) {
    throw OracleError("ProfileMismatch", "profile needs one strategy per player");
  }
  for (std::size_t k = 0; k < profile.size(); ++k) {
    if (profile[k].size() != static_cast<std::size_t>(g.actions[k])) {
      throw OracleError("ProfileMismatch",
                        "strategy of player " + std::to_string(k + 1) +
                            " has the wrong number of actions");
    }
  }
}

MixedStrategy Pure(int n, int a) {
  MixedStrategy s(n, 0.0);
  s[a] = 1.0;
  return s;
}

MixedStrategy UniformStrategy(int n) { return MixedStrategy(n, 1.0 / n); }

void Normalize(MixedStrategy& s) {
  double total = 0;
  for (double& v : s) {
    v = std::max(v, 0.0);
    total += v;
  }
  if (total <= 0) {
    std::fill(s.begin(), s.end(), 1.0 / static_cast<double>(s.size()));
    return;
  }
  for (double& v : s) v /= total;
}

}  // namespace

double ExpectedPayoff(const ConcreteGame& g, const PayoffExpr& u,
                      const std::vector<MixedStrategy>& profile) {
  if (u.IsVariable()) {
    throw OracleError("UnboundPayoff", "payoff variable " + u.variable + " has no value");
  }
  CheckProfile(g, profile);
  const std::size_t r = g.actions.size();
  std::vector<int> a(r, 0);
  double total = 0;
  const std::size_t count = g.ProfileCount();
  for (std::size_t idx = 0; idx < count; ++idx) {
    double prob = 1;
    for (std::size_t k = 0; k < r && prob != 0; ++k) prob *= profile[k][a[k]];
    if (prob != 0) {
      double v = 0;
      for (const auto& [p, c] : u.coeffs) v += c.ToDouble() * g.payoffs[p - 1][idx];
      total += prob * v;
    }
    for (int k = static_cast<int>(r) - 1; k >= 0; --k) {
      if (++a[k] < g.actions[k]) break;
      a[k] = 0;
    }
  }
  return total;
}

double BestPayoff(const ConcreteGame& g, const PayoffExpr& u, int player,
                  const std::vector<MixedStrategy>& profile) {
  std::vector<MixedStrategy> p = profile;
  double best = -kInf;
  for (int a = 0; a < g.actions[player - 1]; ++a) {
    p[player - 1] = Pure(g.actions[player - 1], a);
    best = std::max(best, ExpectedPayoff(g, u, p));
  }
  return best;
}

double Regret(const ConcreteGame& g, int player,
              const std::vector<MixedStrategy>& profile) {
  PayoffExpr u = PayoffExpr::Base(player);
  return BestPayoff(g, u, player, profile) - ExpectedPayoff(g, u, profile);
}

double MaxRegret(const ConcreteGame& g, const std::vector<MixedStrategy>& profile) {
  double worst = -kInf;
  for (int i = 1; i <= g.players(); ++i) worst = std::max(worst, Regret(g, i, profile));
  return worst;
}

// ---------------------------------------------------------------------------
// Bimatrix equilibria

namespace {

using Matrix = std::vector<std::vector<double>>;

// Mixed strategy over `cols` making every row in `rows` of `m` indifferent,
// or empty when the system is singular or the solution leaves the simplex.
std::vector<double> Indifference(const Matrix& m, const std::vector<int>& rows,
                                 const std::vector<int>& cols, bool transpose,
                                 double* value) {
  const int k = static_cast<int>(rows.size());
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(k + 1, k + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  for (int p = 0; p < k; ++p) {
    for (int q = 0; q < k; ++q) {
      sys(p, q) = transpose ? m[cols[q]][rows[p]] : m[rows[p]][cols[q]];
    }
    sys(p, k) = -1;
    sys(k, p) = 1;
  }
  rhs(k) = 1;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  if (!lu.isInvertible()) return {};
  Eigen::VectorXd sol = lu.solve(rhs);
  if ((sys * sol - rhs).cwiseAbs().maxCoeff() > 1e-9) return {};
  std::vector<double> w(k);
  for (int q = 0; q < k; ++q) {
    if (sol(q) < -1e-10) return {};
    w[q] = std::max(sol(q), 0.0);
  }
  *value = sol(k);
  return w;
}

std::vector<std::vector<int>> Subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    std::vector<int> s;
    for (int b = 0; b < n; ++b) {
      if (mask & (1u << b)) s.push_back(b);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::optional<std::pair<MixedStrategy, MixedStrategy>> SolveBimatrix(const Matrix& a,
                                                                     const Matrix& b) {
  const int m = static_cast<int>(a.size());
  if (m == 0) return std::nullopt;
  const int n = static_cast<int>(a[0].size());
  if (m > 16 || n > 16) {
    throw OracleError("CapacityError", "support enumeration is limited to 16 actions");
  }
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) {
      bool row_best = true, col_best = true;
      for (int r2 = 0; r2 < m; ++r2) row_best = row_best && a[r2][c] <= a[r][c];
      for (int c2 = 0; c2 < n; ++c2) col_best = col_best && b[r][c2] <= b[r][c];
      if (row_best && col_best) return std::make_pair(Pure(m, r), Pure(n, c));
    }
  }
  for (int k = 2; k <= std::min(m, n); ++k) {
    auto row_sets = Subsets(m, k);
    auto col_sets = Subsets(n, k);
    for (const auto& rows : row_sets) {
      for (const auto& cols : col_sets) {
        double v = 0, w = 0;
        std::vector<double> y = Indifference(a, rows, cols, false, &v);
        if (y.empty()) continue;
        std::vector<double> x = Indifference(b, cols, rows, true, &w);
        if (x.empty()) continue;
        MixedStrategy xs(m, 0.0), ys(n, 0.0);
        for (int p = 0; p < k; ++p) {
          xs[rows[p]] = x[p];
          ys[cols[p]] = y[p];
        }
        bool ok = true;
        for (int r = 0; r < m && ok; ++r) {
          double s = 0;
          for (int c = 0; c < n; ++c) s += a[r][c] * ys[c];
          ok = s <= v + 1e-9;
        }
        for (int c = 0; c < n && ok; ++c) {
          double s = 0;
          for (int r = 0; r < m; ++r) s += b[r][c] * xs[r];
          ok = s <= w + 1e-9;
        }
        if (!ok) continue;
        Normalize(xs);
        Normalize(ys);
        return std::make_pair(xs, ys);
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Traces

std::vector<MixedStrategy> Trace::Profile(const std::vector<std::string>& names) const {
  std::vector<MixedStrategy> out;
  for (const auto& n : names) {
    auto it = strategies.find(n);
    if (it == strategies.end()) {
      throw OracleError("UnknownStrategy", "trace has no strategy '" + n + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

double Trace::MaxRegret() const {
  if (regrets.empty()) return 0;
  return *std::max_element(regrets.begin(), regrets.end());
}

nlohmann::json TraceToJson(const Trace& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) {
    nlohmann::json js{{"statement", s.statement}, {"block", s.block}, {"outputs", s.outputs}};
    if (!s.note.empty()) js["note"] = s.note;
    steps.push_back(std::move(js));
  }
  nlohmann::json j{{"strategies", t.strategies},
                   {"reals", t.reals},
                   {"steps", steps},
                   {"profile", t.profile},
                   {"regrets", t.regrets},
                   {"partial", t.partial}};
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

namespace {

// Two-player slice of a game with the remaining players fixed.
struct Slice {
  int p = 0, q = 0;
  Matrix a, b;  // payoffs of p and q, indexed [action of p][action of q]
};

Slice MakeSlice(const ConcreteGame& g, int p, int q, std::vector<MixedStrategy> base,
                const PayoffExpr& up, const PayoffExpr& uq) {
  Slice s;
  s.p = p;
  s.q = q;
  const int m = g.actions[p - 1], n = g.actions[q - 1];
  s.a.assign(m, std::vector<double>(n));
  s.b.assign(m, std::vector<double>(n));
  for (int x = 0; x < m; ++x) {
    base[p - 1] = Pure(m, x);
    for (int y = 0; y < n; ++y) {
      base[q - 1] = Pure(n, y);
      s.a[x][y] = ExpectedPayoff(g, up, base);
      s.b[x][y] = ExpectedPayoff(g, uq, base);
    }
  }
  return s;
}

std::vector<double> MatVec(const Matrix& m, const MixedStrategy& y) {
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < y.size(); ++c) out[r] += m[r][c] * y[c];
  }
  return out;
}

std::vector<double> VecMat(const MixedStrategy& x, const Matrix& m) {
  std::vector<double> out(m.empty() ? 0 : m[0].size(), 0.0);
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += x[r] * m[r][c];
  }
  return out;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<int> NearArgmax(const std::vector<double>& v, double tol) {
  double best = *std::max_element(v.begin(), v.end());
  std::vector<int> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] >= best - tol) out.push_back(static_cast<int>(k));
  }
  return out;
}

// Row player minimizes x'M, column player maximizes My.
std::pair<MixedStrategy, MixedStrategy> SolveZeroSum(const Matrix& m) {
  const int rows = static_cast<int>(m.size()), cols = static_cast<int>(m[0].size());
  double lo = kInf, hi = -kInf;
  for (const auto& r : m) {
    for (double v : r) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  auto solve = [&](bool minimizer) {
    const int n = minimizer ? rows : cols;
    LpProblem lp;
    for (int k = 0; k < n; ++k) lp.AddVariable(0, 1);
    int v = lp.AddVariable(lo - 1, hi + 1, minimizer ? -1.0 : 1.0);
    std::vector<std::pair<int, double>> simplex;
    for (int k = 0; k < n; ++k) simplex.push_back({k, 1.0});
    lp.AddRow(simplex, 1, 1);
    const int other = minimizer ? cols : rows;
    for (int o = 0; o < other; ++o) {
      std::vector<std::pair<int, double>> row;
      for (int k = 0; k < n; ++k) row.push_back({k, minimizer ? m[k][o] : m[o][k]});
      row.push_back({v, -1.0});
      if (minimizer) {
        lp.AddRow(row, -kInf, 0);
      } else {
        lp.AddRow(row, 0, kInf);
      }
    }
    LpResult res = SolveLp(lp);
    if (res.status != LpStatus::kOptimal) {
      throw OracleError("NonConvergence", std::string("zero-sum LP ended ") +
                                              LpStatusName(res.status));
    }
    MixedStrategy s(res.x.begin(), res.x.begin() + n);
    Normalize(s);
    return s;
  };
  return {solve(true), solve(false)};
}

double EdgeArgmin(const std::vector<double>& a, const std::vector<double>& b) {
  auto value = [&](double lambda) {
    double m = -kInf;
    for (std::size_t k = 0; k < a.size(); ++k) {
      m = std::max(m, a[k] * (1 - lambda) + b[k] * lambda);
    }
    return m;
  };
  std::vector<double> candidates{0.0, 1.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      double da = a[i] - a[j], db = b[i] - b[j];
      if (da * db < 0) candidates.push_back(std::clamp(da / (da - db), 0.0, 1.0));
    }
  }
  double best = candidates[0], best_value = value(best);
  for (double c : candidates) {
    double v = value(c);
    if (v < best_value) {
      best_value = v;
      best = c;
    }
  }
  return best;
}

std::uint64_t Binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int t = 1; t <= k; ++t) r = r * static_cast<std::uint64_t>(n - k + t) / t;
  return r;
}

// Every weight vector of length m whose entries are multiples of 1/steps.
std::vector<std::vector<double>> SimplexGrid(int m, int steps) {
  std::vector<std::vector<double>> out;
  std::vector<int> c(m, 0);
  std::function<void(int, int)> rec = [&](int k, int left) {
    if (k == m - 1) {
      c[k] = left;
      std::vector<double> w(m);
      for (int t = 0; t < m; ++t) w[t] = static_cast<double>(c[t]) / steps;
      out.push_back(std::move(w));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[k] = v;
      rec(k + 1, left - v);
    }
  };
  rec(0, steps);
  return out;
}

class Runner {
 public:
  Runner(const SourceProgram& prog, const ConcreteGame& g, std::uint64_t seed,
         const OracleOptions& opt)
      : prog_(prog), g_(g), opt_(opt), rng_(seed) {}

  Trace Run() {
    if (prog_.player_count != g_.players()) {
      throw OracleError("PlayerMismatch",
                        "program has " + std::to_string(prog_.player_count) +
                            " players but the game has " + std::to_string(g_.players()));
    }
    const auto& stmts = prog_.algorithm.statements;
    for (std::size_t k = 0; k < stmts.size() && !t_.partial; ++k) {
      step_ = TraceStep{static_cast<int>(k), stmts[k].block, stmts[k].outputs, ""};
      Execute(stmts[k], static_cast<int>(k));
      t_.steps.push_back(step_);
    }
    if (!t_.partial && prog_.algorithm.return_profile) {
      t_.profile = *prog_.algorithm.return_profile;
      auto profile = t_.Profile(t_.profile);
      for (int i = 1; i <= g_.players(); ++i) t_.regrets.push_back(Regret(g_, i, profile));
    }
    return std::move(t_);
  }

 private:
  void MarkPartial(const std::string& why) {
    t_.partial = true;
    step_.note = why;
    t_.note = "statement " + std::to_string(step_.statement + 1) + " (" + step_.block +
              "): " + why;
  }

  void Set(const std::string& name, int player, MixedStrategy s) {
    t_.strategies[name] = std::move(s);
    t_.player_of[name] = player;
  }

  const MixedStrategy& Get(const std::string& name) const {
    auto it = t_.strategies.find(name);
    if (it == t_.strategies.end()) {
      throw OracleError("UnknownStrategy", "no value for '" + name + "'");
    }
    return it->second;
  }

  static std::vector<std::string> Idents(const Statement& st) {
    std::vector<std::string> out;
    for (const auto& a : st.args) {
      if (a.kind == Argument::Kind::kIdent) out.push_back(a.ident);
    }
    return out;
  }

  // Profile with the listed players left as placeholders and `others`
  // filling the remaining slots in ascending player order.
  std::vector<MixedStrategy> Fill(const std::vector<int>& open,
                                  const std::vector<std::string>& others) const {
    std::vector<MixedStrategy> prof(g_.players());
    std::size_t next = 0;
    for (int k = 1; k <= g_.players(); ++k) {
      if (std::find(open.begin(), open.end(), k) != open.end()) {
        prof[k - 1] = UniformStrategy(g_.actions[k - 1]);
        continue;
      }
      if (next >= others.size()) throw OracleError("ArityMismatch", "profile too short");
      prof[k - 1] = Get(others[next++]);
    }
    return prof;
  }

  MixedStrategy BestResponse(int player, std::vector<MixedStrategy> prof,
                             const PayoffExpr& u) const {
    int best = 0;
    double best_v = -kInf;
    for (int a = 0; a < g_.actions[player - 1]; ++a) {
      prof[player - 1] = Pure(g_.actions[player - 1], a);
      double v = ExpectedPayoff(g_, u, prof);
      if (v > best_v) {
        best_v = v;
        best = a;
      }
    }
    return Pure(g_.actions[player - 1], best);
  }

  void Execute(const Statement& st, int index) {
    if (auto ref = ParseLibraryName(st.block)) {
      ExecuteLibrary(*ref, st, index);
      return;
    }
    const BlockDecl* b = FindUserBlock(prog_, st.block);
    if (!b) throw OracleError("UnknownBlock", "unknown block " + st.block);
    ExecuteUser(*b, st);
  }

  void ExecuteLibrary(const LibraryRef& ref, const Statement& st, int index) {
    const std::vector<std::string> ids = Idents(st);
    const int i = ref.i, j = ref.j;
    switch (ref.kind) {
      case LibraryKind::kRandom: {
        std::exponential_distribution<double> e(1.0);
        MixedStrategy s(g_.actions[i - 1]);
        for (double& v : s) v = e(rng_);
        Normalize(s);
        Set(st.outputs[0], i, std::move(s));
        return;
      }
      case LibraryKind::kBestResponse:
        Set(st.outputs[0], i, BestResponse(i, Fill({i}, ids), PayoffExpr::Base(i)));
        return;
      case LibraryKind::kZeroSumNE: {
        const PayoffExpr* u = nullptr;
        for (const auto& a : st.args) {
          if (a.kind == Argument::Kind::kPayoff) u = &a.payoff;
        }
        if (!u) throw OracleError("ArityMismatch", "ZeroSumNE needs a payoff");
        Slice s = MakeSlice(g_, i, j, Fill({i, j}, ids), *u, *u);
        auto [x, y] = SolveZeroSum(s.a);
        Set(st.outputs[0], i, std::move(x));
        Set(st.outputs[1], j, std::move(y));
        return;
      }
      case LibraryKind::kStationaryPoint:
        Stationary(i, j, ids, st, index);
        return;
      case LibraryKind::kUniformMixing: {
        MixedStrategy s(g_.actions[i - 1], 0.0);
        for (const auto& id : ids) {
          const MixedStrategy& p = Get(id);
          for (std::size_t k = 0; k < s.size(); ++k) s[k] += p[k] / ids.size();
        }
        Set(st.outputs[0], i, std::move(s));
        return;
      }
      case LibraryKind::kMix: {
        double lambda = 0;
        for (const auto& a : st.args) {
          if (a.kind == Argument::Kind::kNumber) lambda = a.number.ToDouble();
        }
        const MixedStrategy& a = Get(ids.at(0));
        const MixedStrategy& b = Get(ids.at(1));
        MixedStrategy s(a.size());
        for (std::size_t k = 0; k < s.size(); ++k) s[k] = lambda * a[k] + (1 - lambda) * b[k];
        Set(st.outputs[0], i, std::move(s));
        return;
      }
      case LibraryKind::kOptimalMixing:
        OptimalMixing(ids, st);
        return;
      case LibraryKind::kIfThenElse:
        MarkPartial("branching is not executed by the oracle");
        return;
    }
  }

  void ExecuteUser(const BlockDecl& b, const Statement& st) {
    if (b.outputs.empty()) {
      step_.note = "assumption, checked against the encoding";
      return;
    }
    if (b.realize != Realize::kNash) {
      MarkPartial("opaque block without a concrete realization");
      return;
    }
    std::map<int, std::string> fixed;
    for (std::size_t k = 0; k < b.inputs.size() && k < st.args.size(); ++k) {
      if (!b.inputs[k].type.IsStrategy()) continue;
      int p = b.inputs[k].type.player;
      if (fixed.count(p)) {
        MarkPartial("several inputs for player " + std::to_string(p));
        return;
      }
      fixed[p] = st.args[k].ident;
    }
    std::vector<int> open;
    for (const auto& o : b.outputs) open.push_back(o.type.player);
    std::vector<MixedStrategy> prof(g_.players());
    for (int p = 1; p <= g_.players(); ++p) {
      if (std::find(open.begin(), open.end(), p) != open.end()) {
        prof[p - 1] = UniformStrategy(g_.actions[p - 1]);
      } else if (fixed.count(p)) {
        prof[p - 1] = Get(fixed[p]);
      } else {
        MarkPartial("no strategy for player " + std::to_string(p));
        return;
      }
    }
    if (open.size() == 1) {
      int p = open[0];
      Set(st.outputs[0], p, BestResponse(p, prof, PayoffExpr::Base(p)));
      return;
    }
    if (open.size() != 2 || open[0] == open[1]) {
      MarkPartial("equilibria are computed for one or two output players only");
      return;
    }
    Slice s = MakeSlice(g_, open[0], open[1], prof, PayoffExpr::Base(open[0]),
                        PayoffExpr::Base(open[1]));
    auto ne = SolveBimatrix(s.a, s.b);
    if (!ne) {
      MarkPartial("support enumeration found no equilibrium");
      return;
    }
    Set(st.outputs[0], open[0], ne->first);
    Set(st.outputs[1], open[1], ne->second);
  }

  // Descent on max(f_p, f_q) over the slice, followed by the dual witness of
  // the stationarity condition.
  void Stationary(int p, int q, const std::vector<std::string>& ids, const Statement& st,
                  int index) {
    Slice s = MakeSlice(g_, p, q, Fill({p, q}, ids), PayoffExpr::Base(p),
                        PayoffExpr::Base(q));
    const int m = static_cast<int>(s.a.size()), n = static_cast<int>(s.a[0].size());
    MixedStrategy x = UniformStrategy(m), y = UniformStrategy(n);
    auto losses = [&](const MixedStrategy& xs, const MixedStrategy& ys) {
      std::vector<double> ay = MatVec(s.a, ys), xb = VecMat(xs, s.b);
      double fa = *std::max_element(ay.begin(), ay.end()) - Dot(xs, ay);
      double fb = *std::max_element(xb.begin(), xb.end()) - Dot(xb, ys);
      return std::make_pair(fa, fb);
    };
    auto descend = [&](double target, int budget) {
      for (int it = 0; it < budget; ++it) {
        std::vector<double> ay = MatVec(s.a, y), xa = VecMat(x, s.a);
        std::vector<double> by = MatVec(s.b, y), xb = VecMat(x, s.b);
        double xay = Dot(x, ay), xby = Dot(xb, y);
        auto [fa, fb] = losses(x, y);
        double f = std::max(fa, fb);
        LpProblem lp;
        for (int k = 0; k < m + n; ++k) lp.AddVariable(0, 1);
        int sa = lp.AddVariable(-2, 2), sb = lp.AddVariable(-2, 2);
        int t = lp.AddVariable(-8, 8, -1.0);
        std::vector<std::pair<int, double>> sx, sy;
        for (int k = 0; k < m; ++k) sx.push_back({k, 1.0});
        for (int k = 0; k < n; ++k) sy.push_back({m + k, 1.0});
        lp.AddRow(sx, 1, 1);
        lp.AddRow(sy, 1, 1);
        for (int a : NearArgmax(ay, 1e-9)) {
          std::vector<std::pair<int, double>> row{{sa, 1.0}};
          for (int c = 0; c < n; ++c) row.push_back({m + c, -s.a[a][c]});
          lp.AddRow(row, 0, kInf);
        }
        for (int b : NearArgmax(xb, 1e-9)) {
          std::vector<std::pair<int, double>> row{{sb, 1.0}};
          for (int r = 0; r < m; ++r) row.push_back({r, -s.b[r][b]});
          lp.AddRow(row, 0, kInf);
        }
        std::vector<std::pair<int, double>> ra{{t, 1.0}, {sa, -1.0}}, rb{{t, 1.0}, {sb, -1.0}};
        for (int r = 0; r < m; ++r) {
          ra.push_back({r, ay[r]});
          rb.push_back({r, by[r]});
        }
        for (int c = 0; c < n; ++c) {
          ra.push_back({m + c, xa[c]});
          rb.push_back({m + c, xb[c]});
        }
        lp.AddRow(ra, xay, kInf);
        lp.AddRow(rb, xby, kInf);
        LpResult res = SolveLp(lp);
        if (res.status != LpStatus::kOptimal) return;
        double v = res.x[t] - f;
        if (v >= -target) return;
        bool moved = false;
        for (double eps = 1; eps > 1e-12; eps *= 0.5) {
          MixedStrategy xn(m), yn(n);
          for (int k = 0; k < m; ++k) xn[k] = x[k] + eps * (res.x[k] - x[k]);
          for (int k = 0; k < n; ++k) yn[k] = y[k] + eps * (res.x[m + k] - y[k]);
          auto [na, nb] = losses(xn, yn);
          if (std::max(na, nb) <= f + 0.5 * eps * v) {
            x = std::move(xn);
            y = std::move(yn);
            moved = true;
            break;
          }
        }
        if (!moved) return;
      }
    };
    descend(opt_.delta_num, opt_.stationary_max_iterations);
    auto [fa, fb] = losses(x, y);
    if (std::fabs(fa - fb) > 5e-5) {
      descend(1e-9, opt_.stationary_max_iterations);
      std::tie(fa, fb) = losses(x, y);
    }
    const std::string rho = FreshRealName("rho", index);
    auto exact_equilibrium = [&](const std::string& why) {
      auto ne = SolveBimatrix(s.a, s.b);
      if (!ne) {
        MarkPartial(why + " and no exact equilibrium");
        return;
      }
      step_.note = why + ", fell back to an exact equilibrium";
      Set(st.outputs[0], p, ne->first);
      Set(st.outputs[1], q, ne->second);
      Set(st.outputs[2], p, ne->first);
      Set(st.outputs[3], q, ne->second);
      t_.reals[rho] = 1.0;
    };
    if (std::fabs(fa - fb) > 5e-5) {
      exact_equilibrium("stationary point without equal losses");
      return;
    }
    std::vector<double> ay = MatVec(s.a, y), xa = VecMat(x, s.a);
    std::vector<double> by = MatVec(s.b, y), xb = VecMat(x, s.b);
    double xay = Dot(x, ay), xby = Dot(xb, y);
    std::vector<int> sa = NearArgmax(ay, 1e-9), sb = NearArgmax(xb, 1e-9);
    LpProblem lp;
    int rv = lp.AddVariable(0, 1);
    std::vector<int> wv, zv;
    for (std::size_t k = 0; k < sa.size(); ++k) wv.push_back(lp.AddVariable(0, 1));
    for (std::size_t k = 0; k < sb.size(); ++k) zv.push_back(lp.AddVariable(0, 1));
    int t = lp.AddVariable(-8, 8, 1.0);
    std::vector<std::pair<int, double>> sum_w{{rv, -1.0}}, sum_z{{rv, 1.0}};
    for (int w : wv) sum_w.push_back({w, 1.0});
    for (int z : zv) sum_z.push_back({z, 1.0});
    lp.AddRow(sum_w, 0, 0);
    lp.AddRow(sum_z, 1, 1);
    for (int a2 = 0; a2 < m; ++a2) {
      for (int b2 = 0; b2 < n; ++b2) {
        std::vector<std::pair<int, double>> row{{t, 1.0}};
        for (std::size_t k = 0; k < sa.size(); ++k) row.push_back({wv[k], -s.a[sa[k]][b2]});
        for (std::size_t k = 0; k < sb.size(); ++k) row.push_back({zv[k], -s.b[a2][sb[k]]});
        row.push_back({rv, ay[a2] + xa[b2] - xay - by[a2] - xb[b2] + xby});
        lp.AddRow(row, -kInf, -(by[a2] + xb[b2] - xby));
      }
    }
    LpResult res = SolveLp(lp);
    if (res.status != LpStatus::kOptimal) {
      MarkPartial(std::string("stationarity witness LP ended ") + LpStatusName(res.status));
      return;
    }
    double r = std::clamp(res.x[rv], 0.0, 1.0);
    MixedStrategy w(m, 0.0), z(n, 0.0);
    if (r > 1e-12) {
      for (std::size_t k = 0; k < sa.size(); ++k) w[sa[k]] = res.x[wv[k]];
    } else {
      w[sa[0]] = 1;
    }
    if (1 - r > 1e-12) {
      for (std::size_t k = 0; k < sb.size(); ++k) z[sb[k]] = res.x[zv[k]];
    } else {
      z[sb[0]] = 1;
    }
    Normalize(w);
    Normalize(z);
    double gap = std::max(fa, fb) - res.x[t];
    if (gap > opt_.delta_num) {
      exact_equilibrium("descent stopped with stationarity gap " + std::to_string(gap));
      return;
    }
    Set(st.outputs[0], p, std::move(x));
    Set(st.outputs[1], q, std::move(y));
    Set(st.outputs[2], p, std::move(w));
    Set(st.outputs[3], q, std::move(z));
    t_.reals[rho] = r;
  }

  void OptimalMixing(const std::vector<std::string>& ids, const Statement& st) {
    const int r = g_.players();
    std::vector<std::vector<const MixedStrategy*>> lists(r);
    for (const auto& id : ids) {
      auto it = t_.player_of.find(id);
      if (it == t_.player_of.end()) {
        throw OracleError("UnknownStrategy", "no value for '" + id + "'");
      }
      lists[it->second - 1].push_back(&Get(id));
    }
    std::vector<int> counts;
    for (const auto& l : lists) {
      if (l.empty()) {
        MarkPartial("a player has no strategy to mix");
        return;
      }
      counts.push_back(static_cast<int>(l.size()));
    }
    using Weights = std::vector<std::vector<double>>;
    auto profile_of = [&](const Weights& w) {
      std::vector<MixedStrategy> prof(r);
      for (int k = 0; k < r; ++k) {
        prof[k].assign(g_.actions[k], 0.0);
        for (std::size_t s = 0; s < lists[k].size(); ++s) {
          for (int a = 0; a < g_.actions[k]; ++a) prof[k][a] += w[k][s] * (*lists[k][s])[a];
        }
      }
      return prof;
    };
    auto vertex_weights = [&](const std::vector<int>& v) {
      Weights w(r);
      for (int k = 0; k < r; ++k) {
        w[k].assign(counts[k], 0.0);
        w[k][v[k]] = 1;
      }
      return w;
    };
    Weights best;
    double best_f = kInf;
    auto consider = [&](const Weights& w) {
      double f = MaxRegret(g_, profile_of(w));
      if (f < best_f) {
        best_f = f;
        best = w;
      }
      return f;
    };

    EdgeBoundSpec spec;
    try {
      spec = EnumerateMixingPolytope(counts);
    } catch (const BlockError& e) {
      MarkPartial(e.what());
      return;
    }
    std::vector<std::vector<double>> vertex_losses;
    for (const auto& v : spec.vertices) {
      auto prof = profile_of(vertex_weights(v));
      std::vector<double> l;
      for (int i = 1; i <= r; ++i) l.push_back(Regret(g_, i, prof));
      vertex_losses.push_back(std::move(l));
      consider(vertex_weights(v));
    }
    for (const auto& e : spec.edges) {
      double lambda = EdgeArgmin(vertex_losses[e.from], vertex_losses[e.to]);
      Weights w = vertex_weights(spec.vertices[e.from]);
      const int k = e.player - 1;
      w[k][spec.vertices[e.from][k]] = 1 - lambda;
      w[k][spec.vertices[e.to][k]] += lambda;
      consider(w);
    }

    // Coarsest admissible grid, then pattern search around the incumbent.
    const int max_steps = static_cast<int>(std::lround(1.0 / opt_.grid_step));
    int steps = 0;
    for (int cand = max_steps; cand >= 1; --cand) {
      double total = 1;
      for (int c : counts) total *= static_cast<double>(Binomial(cand + c - 1, c - 1));
      if (total <= static_cast<double>(opt_.max_grid_points)) {
        steps = cand;
        break;
      }
    }
    if (steps > 1) {
      std::vector<std::vector<std::vector<double>>> grids;
      for (int c : counts) grids.push_back(SimplexGrid(c, steps));
      std::vector<std::size_t> pos(r, 0);
      while (true) {
        Weights w(r);
        for (int k = 0; k < r; ++k) w[k] = grids[k][pos[k]];
        consider(w);
        int k = r - 1;
        for (; k >= 0; --k) {
          if (++pos[k] < grids[k].size()) break;
          pos[k] = 0;
        }
        if (k < 0) break;
      }
    }
    double h = steps > 1 ? 0.5 / steps : 0.25;
    while (h >= opt_.refine_step) {
      bool improved = true;
      for (int round = 0; improved && round < 200; ++round) {
        improved = false;
        for (int k = 0; k < r; ++k) {
          for (int a = 0; a < counts[k]; ++a) {
            for (int b = 0; b < counts[k]; ++b) {
              if (a == b || best[k][a] <= 0) continue;
              Weights w = best;
              double move = std::min(h, w[k][a]);
              w[k][a] -= move;
              w[k][b] += move;
              double before = best_f;
              if (consider(w) < before - 1e-15) improved = true;
            }
          }
        }
      }
      h *= 0.5;
    }
    auto prof = profile_of(best);
    for (int k = 0; k < r; ++k) Set(st.outputs[k], k + 1, prof[k]);
  }

  const SourceProgram& prog_;
  const ConcreteGame& g_;
  const OracleOptions& opt_;
  std::mt19937_64 rng_;
  Trace t_;
  TraceStep step_;
};

SourceProgram Returned(const SourceProgram& prog) {
  if (!prog.options.auto_return_optimal_mixing || prog.algorithm.return_profile) {
    return prog;
  }
  try {
    return AutoReturn(prog);
  } catch (const BlockError& e) {
    throw OracleError(e.kind(), e.what());
  }
}

}  // namespace

Trace RunConcrete(const SourceProgram& prog, const ConcreteGame& game, std::uint64_t seed,
                  const OracleOptions& options) {
  SourceProgram p = Returned(prog);
  return Runner(p, game, seed, options).Run();
}

// ---------------------------------------------------------------------------
// Sampling and validation

int DefaultMaxActions(int players) { return players <= 2 ? 5 : 3; }

GameSampler::GameSampler(int players, int max_actions, std::uint64_t seed, bool corners)
    : players_(players),
      max_actions_(std::max(2, max_actions)),
      corners_(corners),
      rng_(seed) {}

ConcreteGame GameSampler::Next() {
  const std::size_t k = count_++;
  if (corners_ && k < 4) {
    std::vector<int> actions(players_, max_actions_);
    switch (k) {
      case 0:
        return ConcreteGame::Constant(actions, 0.0);
      case 1:
        return ConcreteGame::Constant(actions, 1.0);
      case 2:
        return ConcreteGame::IdentityLike(actions);
      default:
        return ConcreteGame::DuplicatedRows(actions, rng_);
    }
  }
  std::uniform_int_distribution<int> pick(2, max_actions_);
  std::vector<int> actions(players_);
  for (int& a : actions) a = pick(rng_);
  return ConcreteGame::Uniform(actions, rng_);
}

namespace {

constexpr double kExactTol = 1e-9;
constexpr double kApproxTol = 1e-4;

struct Verdict {
  double excess = -kInf;  // worst violation minus its tolerance
  std::size_t violated = 0;
  std::size_t atoms = 0;
  std::optional<EncodingViolation> detail;
};

class TraceEvaluator {
 public:
  TraceEvaluator(const ConcreteGame& g, const Trace& t, double delta)
      : g_(g), t_(t), delta_(delta) {}

  Verdict Evaluate(const Formula& f) {
    Verdict v;
    switch (f->kind) {
      case FormulaKind::kAtom:
        return Atom(f->atom);
      case FormulaKind::kAnd:
        for (const auto& k : f->kids) {
          Verdict c = Evaluate(k);
          v.atoms += c.atoms;
          v.violated += c.violated;
          if (c.excess > v.excess) v.excess = c.excess;
          if (!v.detail && c.detail) v.detail = c.detail;
        }
        return v;
      case FormulaKind::kOr: {
        std::optional<Verdict> best;
        std::size_t atoms = 0;
        for (const auto& k : f->kids) {
          Verdict c = Evaluate(k);
          atoms += c.atoms;
          if (!best || c.excess < best->excess) best = std::move(c);
        }
        if (!best) {
          v.excess = kInf;
          v.violated = 1;
          return v;
        }
        v = std::move(*best);
        v.atoms = atoms;
        if (v.excess <= 0) {
          v.violated = 0;
          v.detail.reset();
        } else {
          v.violated = 1;
        }
        return v;
      }
    }
    return v;
  }

 private:
  double TermValue(const Term& t) {
    switch (t.kind) {
      case TermKind::kConstant:
        return t.value.ToDouble();
      case TermKind::kRealVar: {
        if (auto it = local_.find(t.name); it != local_.end()) return it->second;
        if (auto it = t_.reals.find(t.name); it != t_.reals.end()) return it->second;
        if (t.name == kDeltaName) return delta_;
        throw OracleError("UnknownReal", "no value for real '" + t.name + "'");
      }
      default:
        break;
    }
    const std::string key = t.Key();
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    double v = 0;
    if (t.kind == TermKind::kPayoff) {
      v = ExpectedPayoff(g_, t.payoff, t_.Profile(t.args));
    } else if (t.kind == TermKind::kLoss) {
      v = Regret(g_, t.player, t_.Profile(t.args));
    } else {
      std::vector<MixedStrategy> prof;
      for (std::size_t k = 0; k < t.args.size(); ++k) {
        prof.push_back(static_cast<int>(k) == t.player - 1
                           ? UniformStrategy(g_.actions[k])
                           : t_.Profile({t.args[k]})[0]);
      }
      v = BestPayoff(g_, t.payoff, t.player, prof);
    }
    cache_.emplace(key, v);
    return v;
  }

  double Value(const Expr& e) {
    return EvaluateExpr(e, [this](const Term& t) { return TermValue(t); });
  }

  struct BodyResult {
    double raw = -kInf;
    std::size_t worst = 0;
    double lhs = 0, rhs = 0;
  };

  BodyResult Body(const AtomicProperty& a) {
    BodyResult b;
    for (std::size_t k = 0; k < a.body.size(); ++k) {
      const Comparison& c = a.body[k];
      double l = Value(c.lhs), r = Value(c.rhs);
      double raw = 0;
      switch (c.op) {
        case CmpOp::kLe:
        case CmpOp::kLt:
          raw = l - r;
          break;
        case CmpOp::kGe:
        case CmpOp::kGt:
          raw = r - l;
          break;
        case CmpOp::kEq:
          raw = std::fabs(l - r);
          break;
      }
      if (raw > b.raw) {
        b = {raw, k, l, r};
      }
    }
    return b;
  }

  Verdict Atom(const AtomicProperty& a) {
    bool approximate = a.origin.approximate;
    for (const auto& c : a.body) approximate = approximate || c.origin.approximate;
    const double tol = approximate ? kApproxTol : kExactTol;
    std::vector<const RealBinder*> search;
    for (const auto& b : a.exists) {
      if (!t_.reals.count(b.name)) search.push_back(&b);
    }
    local_.clear();
    BodyResult best;
    if (search.empty()) {
      best = Body(a);
    } else {
      const int per_dim = search.size() == 1 ? 1000 : search.size() == 2 ? 100 : 10;
      std::vector<int> pos(search.size(), 0);
      best.raw = kInf;
      std::map<std::string, double> best_local;
      while (true) {
        for (std::size_t k = 0; k < search.size(); ++k) {
          double lo = search[k]->lo.ToDouble(), hi = search[k]->hi.ToDouble();
          local_[search[k]->name] = lo + (hi - lo) * pos[k] / per_dim;
        }
        BodyResult r = Body(a);
        if (r.raw < best.raw) {
          best = r;
          best_local = local_;
        }
        if (best.raw <= 0) break;
        std::size_t k = 0;
        for (; k < search.size(); ++k) {
          if (++pos[k] <= per_dim) break;
          pos[k] = 0;
        }
        if (k == search.size()) break;
      }
      local_ = best_local;
    }
    Verdict v;
    v.atoms = 1;
    v.excess = best.raw - tol;
    if (v.excess > 0) {
      v.violated = 1;
      EncodingViolation d;
      d.atom = AtomToString(a);
      d.comparison = a.body.empty() ? "" : ComparisonToString(a.body[best.worst]);
      d.lhs = best.lhs;
      d.rhs = best.rhs;
      d.tolerance = tol;
      v.detail = std::move(d);
    }
    local_.clear();
    return v;
  }

  const ConcreteGame& g_;
  const Trace& t_;
  double delta_;
  std::map<std::string, double> cache_;
  std::map<std::string, double> local_;
};

struct PreparedProgram {
  SourceProgram prog;
  std::vector<Formula> parts;  // instantiated
  std::vector<bool> assumption;
};

PreparedProgram Prepare(const SourceProgram& source) {
  PreparedProgram pp;
  pp.prog = Returned(source);
  EncodedProgram enc = EncodeProgram(source);
  for (std::size_t k = 0; k < enc.parts.size(); ++k) {
    pp.parts.push_back(InstantiateFormula(enc.parts[k], enc.universe, enc.payoff_set));
    bool assume = false;
    if (k > 0 && k - 1 < pp.prog.algorithm.statements.size()) {
      const Statement& st = pp.prog.algorithm.statements[k - 1];
      if (const BlockDecl* b = FindUserBlock(pp.prog, st.block)) {
        assume = b->outputs.empty() &&
                 (b->realize == Realize::kAssume || b->realize == Realize::kDefault);
      }
    }
    pp.assumption.push_back(assume);
  }
  return pp;
}

bool AssumptionsHold(const PreparedProgram& pp, TraceEvaluator& ev) {
  for (std::size_t k = 0; k < pp.parts.size(); ++k) {
    if (pp.assumption[k] && ev.Evaluate(pp.parts[k]).excess > 0) return false;
  }
  return true;
}

std::uint64_t GameSeed(std::uint64_t seed, std::size_t index) {
  return internal::SplitMix(seed ^ internal::SplitMix(index + 1));
}

}  // namespace

EncodingReport ValidateEncoding(const SourceProgram& prog, std::size_t games,
                                std::uint64_t seed, int max_actions,
                                const OracleOptions& options) {
  PreparedProgram pp = Prepare(prog);
  const int r = pp.prog.player_count;
  GameSampler sampler(r, max_actions > 0 ? max_actions : DefaultMaxActions(r), seed);
  EncodingReport rep;
  rep.worst_excess = -kInf;
  for (std::size_t gi = 0; gi < games; ++gi) {
    ConcreteGame g = sampler.Next();
    ++rep.games;
    Trace t = Runner(pp.prog, g, GameSeed(seed, gi), options).Run();
    if (t.partial) {
      ++rep.partial;
      continue;
    }
    TraceEvaluator ev(g, t, options.delta_num);
    if (!AssumptionsHold(pp, ev)) {
      ++rep.assumption_skipped;
      continue;
    }
    ++rep.checked;
    for (std::size_t k = 0; k < pp.parts.size(); ++k) {
      if (pp.assumption[k]) continue;
      Verdict v = ev.Evaluate(pp.parts[k]);
      rep.atoms_checked += v.atoms;
      rep.violation_count += v.violated;
      rep.worst_excess = std::max(rep.worst_excess, v.excess);
      if (v.detail && rep.violations.size() < 10) {
        v.detail->game_index = gi;
        v.detail->game = GameToJson(g);
        rep.violations.push_back(std::move(*v.detail));
      }
    }
  }
  return rep;
}

BoundReport ValidateBound(const SourceProgram& prog, double bound, bool delta_flag,
                          std::size_t games, std::uint64_t seed, int max_actions,
                          const OracleOptions& options) {
  PreparedProgram pp = Prepare(prog);
  const int r = pp.prog.player_count;
  GameSampler sampler(r, max_actions > 0 ? max_actions : DefaultMaxActions(r), seed);
  BoundReport rep;
  rep.bound = bound;
  rep.limit = bound + (delta_flag ? options.delta_num : 0.0) + 1e-6;
  rep.max_regret = -kInf;
  for (std::size_t gi = 0; gi < games; ++gi) {
    ConcreteGame g = sampler.Next();
    ++rep.games;
    Trace t = Runner(pp.prog, g, GameSeed(seed, gi), options).Run();
    if (t.partial) {
      ++rep.partial;
      continue;
    }
    TraceEvaluator ev(g, t, options.delta_num);
    if (!AssumptionsHold(pp, ev)) {
      ++rep.assumption_skipped;
      continue;
    }
    ++rep.checked;
    double f = t.MaxRegret();
    if (f > rep.max_regret) rep.max_regret = f;
    if (f > rep.limit) {
      ++rep.violations;
      if (!rep.witness || f > rep.witness_regret) {
        rep.witness = g;
        rep.witness_regret = f;
      }
    }
  }
  return rep;
}

}  // namespace legone
