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

#ifndef LEGONE_BENCHMARKS_H_
#define LEGONE_BENCHMARKS_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legone/compiler.h"
#include "legone/solver.h"

namespace legone {

// A golden bound as written in the manifest, e.g. "0.38197" or "0.33933+δ".
struct GoldenBound {
  double value = 0;
  bool delta = false;
  std::string text;

  // Accepts a decimal optionally followed by "+δ", "+delta" or "+d".
  // Throws std::invalid_argument.
  static GoldenBound Parse(const std::string& text);
};

struct BenchmarkEntry {
  std::string id;
  std::string title;
  std::string source;  // relative to the manifest directory
  bool manual = false;  // hand-encoded problem rather than a program
  GoldenBound golden;
  double tolerance = 1e-4;
  std::string runtime_class = "fast";
  std::string note;
};

struct BenchmarkManifest {
  int version = 1;
  std::string directory;
  std::vector<BenchmarkEntry> entries;
};

BenchmarkManifest LoadManifest(const std::string& path);

// Default corpus location baked in at build time.
std::string DefaultManifestPath();

struct BenchmarkResult {
  BenchmarkEntry entry;
  bool ran = false;
  std::string error;
  BoundCertificate certificate;
  bool pass = false;
  double seconds = 0;

  std::string Label() const { return entry.manual ? "manual encoding" : "automatic"; }
};

struct BenchReport {
  std::vector<BenchmarkResult> results;

  std::size_t Passed() const;
  bool AllPassed() const { return Passed() == results.size(); }
};

OptimizationProblem LoadBenchmarkProblem(const BenchmarkManifest& manifest,
                                         const BenchmarkEntry& entry);

// Never throws for per-entry failures; they are recorded in the result.
BenchmarkResult RunBenchmark(const BenchmarkManifest& manifest,
                             const BenchmarkEntry& entry, const SolverConfig& config);

// Runs entries whose id matches the ECMAScript regex `filter` (all when
// empty).
BenchReport RunBenchmarks(const BenchmarkManifest& manifest, const std::string& filter,
                          const SolverConfig& config);

std::string BenchReportTable(const BenchReport& report);
nlohmann::json BenchReportToJson(const BenchReport& report);

// Polymatrix extension: maximize a subject to a <= b + delta, a <= c + delta,
// b <= d - e, c <= d - h - g + e, d = g.
struct PolymatrixOptions {
  bool tie_d_g = true;
  double box_hi = 1;
};
OptimizationProblem PolymatrixProblem(const PolymatrixOptions& options = {});
BoundCertificate ExtensionPolymatrix(const SolverConfig& config = {},
                                     const PolymatrixOptions& options = {});

// Vertex-cover implication: maximize a - ratio * c subject to a <= 2b,
// c <= a, b <= c with every variable in [0, box]. An optimum of at most zero
// certifies the approximation ratio.
OptimizationProblem VertexCoverProblem(double box = 10, double ratio = 2);

struct VertexCoverResult {
  BoundCertificate certificate;
  double ratio = 2;
  bool certified = false;
};
VertexCoverResult ExtensionVertexCover(double box = 10, double ratio = 2,
                                       const SolverConfig& config = {});

}  // namespace legone

#endif  // LEGONE_BENCHMARKS_H_
