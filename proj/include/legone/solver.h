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

#ifndef LEGONE_SOLVER_H_
#define LEGONE_SOLVER_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legone/compiler.h"
#include "legone/lp.h"

namespace legone {

class SolverError : public std::runtime_error {
 public:
  SolverError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

struct SolverConfig {
  int restarts = 64;
  double tolerance = 1e-7;
  int max_iterations = 2000;
  std::uint64_t seed = 20240601;
  // Exact penalty schedule of the sequential LP method.
  double penalty_initial = 10.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e9;
  double trust_radius_initial = 0.1;
  double trust_radius_max = 1.0;
  // Wall-clock budget of SolveBuiltin, checked between disjuncts; zero
  // disables it. Exceeding it throws SolverError("Timeout").
  double time_limit_seconds = 0;

  // Throws std::invalid_argument when restarts < 1 or tolerance <= 0.
  void Validate() const;
};

enum class SolveStatus { kConverged, kBoxBoundaryHit, kInfeasible, kFailed };
const char* SolveStatusName(SolveStatus s);
std::optional<SolveStatus> ParseSolveStatus(const std::string& s);

struct SolveResult {
  std::string label;
  double value = -kInf;  // -inf for infeasible disjuncts
  std::vector<double> point;
  SolveStatus status = SolveStatus::kFailed;
  int iterations = 0;
  int restarts_used = 0;
  double max_violation = 0;
  // True when the disjunct was linear and solved by a single LP.
  bool exact = false;
};

struct BoundCertificate {
  std::string problem;
  std::vector<std::string> variables;
  std::vector<SolveResult> per_disjunct;
  double bound = -kInf;
  int best_disjunct = -1;
  bool delta_flag = false;
  bool valid = true;
  std::string solver = "builtin";
  std::uint64_t seed = 0;
  int restarts = 0;
  std::size_t trivially_infeasible = 0;
  double seconds = 0;

  // "0.50000", "0.33933+δ", or "-inf" for a vacuous certificate.
  std::string BoundString(int digits = 5) const;
};

nlohmann::json CertificateToJson(const BoundCertificate& cert);
BoundCertificate CertificateFromJson(const nlohmann::json& j);

// Maximizes one disjunct. Linear disjuncts are solved exactly by the simplex
// method; the rest by a multistart trust-region sequential LP method with an
// exact l1 penalty.
SolveResult SolveDisjunct(const OptimizationProblem& problem, std::size_t index,
                          const SolverConfig& config);

BoundCertificate SolveBuiltin(const OptimizationProblem& problem,
                              const SolverConfig& config = {});

enum class ExportDialect { kWolframNMaximize, kGenericJson };
std::optional<ExportDialect> ParseExportDialect(const std::string& s);

// Throws SolverError("UnsupportedExpression").
std::string ExportScript(const OptimizationProblem& problem, ExportDialect dialect);

struct CrossCheckReport {
  std::size_t samples = 0;
  std::size_t accepted = 0;
  double max_found = -kInf;
  double bound = -kInf;
  std::size_t violations = 0;
  std::vector<double> witness;  // the worst feasible sample
  int witness_disjunct = -1;
  bool vacuous() const { return accepted == 0; }
  bool sound() const { return violations == 0; }
};

// Draws feasible points of every disjunct (rejection sampling in the box plus
// a hit-and-run walk that keeps every constraint satisfied) and compares the
// objective against the certified bound.
CrossCheckReport CrossCheck(const OptimizationProblem& problem,
                            const BoundCertificate& cert, std::size_t samples,
                            std::uint64_t seed = 1, double tolerance = 1e-6);

// Throws SolverError("SoundnessViolation") naming the witness.
void RequireSound(const CrossCheckReport& report,
                  const OptimizationProblem& problem);

// Largest constraint violation of a point for one disjunct.
double MaxViolation(const OptimizationProblem& problem, std::size_t index,
                    const std::vector<double>& x);
double ObjectiveValue(const OptimizationProblem& problem, std::size_t index,
                      const std::vector<double>& x);

}  // namespace legone

#endif  // LEGONE_SOLVER_H_
