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

#include "legone/benchmarks.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "legone/pipeline.h"

#ifndef LEGONE_BENCHMARK_DIR
#define LEGONE_BENCHMARK_DIR "benchmarks"
#endif

namespace legone {

GoldenBound GoldenBound::Parse(const std::string& text) {
  GoldenBound g;
  g.text = text;
  std::string number = text;
  for (const char* suffix : {"+δ", "+delta", "+d"}) {
    std::string s(suffix);
    if (number.size() > s.size() && number.compare(number.size() - s.size(), s.size(), s) == 0) {
      number.resize(number.size() - s.size());
      g.delta = true;
      break;
    }
  }
  std::size_t used = 0;
  try {
    g.value = std::stod(number, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != number.size()) {
    throw std::invalid_argument("malformed golden bound '" + text + "'");
  }
  return g;
}

std::string DefaultManifestPath() { return std::string(LEGONE_BENCHMARK_DIR) + "/manifest.json"; }

BenchmarkManifest LoadManifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadTextFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  BenchmarkManifest m;
  m.directory = std::filesystem::path(path).parent_path().string();
  m.version = j.value("version", 1);
  for (const auto& je : j.at("entries")) {
    BenchmarkEntry e;
    e.id = je.at("id");
    e.title = je.value("title", e.id);
    e.source = je.at("source");
    e.manual = je.value("manual", false);
    e.golden = GoldenBound::Parse(je.at("golden"));
    e.tolerance = je.value("tolerance", 1e-4);
    e.runtime_class = je.value("class", "fast");
    e.note = je.value("note", "");
    m.entries.push_back(std::move(e));
  }
  return m;
}

std::size_t BenchReport::Passed() const {
  std::size_t n = 0;
  for (const auto& r : results) n += r.pass ? 1 : 0;
  return n;
}

OptimizationProblem LoadBenchmarkProblem(const BenchmarkManifest& manifest,
                                         const BenchmarkEntry& entry) {
  std::string path = (std::filesystem::path(manifest.directory) / entry.source).string();
  std::string text = ReadTextFile(path);
  if (entry.manual) {
    OptimizationProblem p = ManualProblem(nlohmann::json::parse(text));
    p.name = entry.id;
    return p;
  }
  return CompileSource(text, entry.id).problem;
}

BenchmarkResult RunBenchmark(const BenchmarkManifest& manifest, const BenchmarkEntry& entry,
                             const SolverConfig& config) {
  BenchmarkResult r;
  r.entry = entry;
  auto start = std::chrono::steady_clock::now();
  try {
    OptimizationProblem p = LoadBenchmarkProblem(manifest, entry);
    r.certificate = SolveBuiltin(p, config);
    r.ran = true;
    r.pass = r.certificate.valid && r.certificate.delta_flag == entry.golden.delta &&
             std::fabs(r.certificate.bound - entry.golden.value) <= entry.tolerance;
    if (!r.certificate.valid) r.error = "certificate is not valid";
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

BenchReport RunBenchmarks(const BenchmarkManifest& manifest, const std::string& filter,
                          const SolverConfig& config) {
  std::regex re(filter.empty() ? ".*" : filter);
  BenchReport report;
  for (const auto& e : manifest.entries) {
    if (!std::regex_search(e.id, re)) continue;
    report.results.push_back(RunBenchmark(manifest, e, config));
  }
  return report;
}

namespace {

// Left-justifies `s` to `width` terminal columns, counting UTF-8 code points.
std::string Pad(const std::string& s, std::size_t width) {
  std::size_t cols = 0;
  for (unsigned char c : s) cols += (c & 0xC0) != 0x80 ? 1 : 0;
  return cols >= width ? s + " " : s + std::string(width - cols, ' ');
}

}  // namespace

std::string BenchReportTable(const BenchReport& report) {
  std::ostringstream os;
  os << Pad("id", 10) << Pad("kind", 17) << Pad("golden", 12) << Pad("computed", 12)
     << Pad("|diff|", 10) << Pad("ok", 6) << "seconds\n";
  for (const auto& r : report.results) {
    std::string computed = r.ran ? r.certificate.BoundString() : "error";
    std::string diff = "-";
    if (r.ran && std::isfinite(r.certificate.bound)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2e",
                    std::fabs(r.certificate.bound - r.entry.golden.value));
      diff = buf;
    }
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
    os << Pad(r.entry.id, 10) << Pad(r.Label(), 17) << Pad(r.entry.golden.text, 12)
       << Pad(computed, 12) << Pad(diff, 10) << Pad(r.pass ? "PASS" : "FAIL", 6) << secs
       << "\n";
    if (!r.error.empty()) os << "    error: " << r.error << "\n";
  }
  os << report.Passed() << "/" << report.results.size() << " entries match\n";
  return os.str();
}

nlohmann::json BenchReportToJson(const BenchReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& r : report.results) {
    nlohmann::json j{{"id", r.entry.id},
                     {"kind", r.Label()},
                     {"golden", r.entry.golden.text},
                     {"tolerance", r.entry.tolerance},
                     {"pass", r.pass},
                     {"seconds", r.seconds}};
    if (r.ran) {
      j["bound"] = r.certificate.BoundString(7);
      j["certificate"] = CertificateToJson(r.certificate);
    }
    if (!r.error.empty()) j["error"] = r.error;
    if (!r.entry.note.empty()) j["note"] = r.entry.note;
    entries.push_back(std::move(j));
  }
  return nlohmann::json{{"entries", entries},
                        {"passed", report.Passed()},
                        {"total", report.results.size()}};
}

namespace {

nlohmann::json Variables(const std::vector<std::string>& names, double hi) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& n : names) vars.push_back({{"name", n}, {"lo", 0}, {"hi", hi}});
  return vars;
}

}  // namespace

OptimizationProblem PolymatrixProblem(const PolymatrixOptions& options) {
  std::string cons = "a <= b + delta and a <= c + delta and b <= d - e and c <= d - h - g + e";
  if (options.tie_d_g) cons += " and d = g";
  nlohmann::json spec{{"name", "polymatrix"},
                      {"delta", true},
                      {"variables", Variables({"a", "b", "c", "d", "e", "h", "g"},
                                              options.box_hi)},
                      {"objective", "a"},
                      {"constraints", cons}};
  return ManualProblem(spec);
}

BoundCertificate ExtensionPolymatrix(const SolverConfig& config,
                                     const PolymatrixOptions& options) {
  return SolveBuiltin(PolymatrixProblem(options), config);
}

OptimizationProblem VertexCoverProblem(double box, double ratio) {
  std::ostringstream obj;
  obj.precision(17);
  obj << "a - " << ratio << " * c";
  nlohmann::json spec{{"name", "vertex-cover"},
                      {"delta", false},
                      {"variables", Variables({"a", "b", "c"}, box)},
                      {"objective", obj.str()},
                      {"constraints", "a <= 2 * b and c <= a and b <= c"}};
  return ManualProblem(spec);
}

VertexCoverResult ExtensionVertexCover(double box, double ratio, const SolverConfig& config) {
  VertexCoverResult r;
  r.ratio = ratio;
  r.certificate = SolveBuiltin(VertexCoverProblem(box, ratio), config);
  r.certified = r.certificate.valid && r.certificate.bound <= 1e-6;
  return r;
}

}  // namespace legone
