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

#include "legone/discovery.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "legone/blocks.h"
#include "legone/compiler.h"
#include "legone/encode.h"
#include "legone/pipeline.h"

namespace legone {
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

void DiscoveryConfig::Validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (!(temperature >= 0 && temperature <= 2)) fail("temperature must lie in [0,2]");
  if (max_rounds < 1) fail("max_rounds must be positive");
  if (duplicate_threshold < 1) fail("duplicate_threshold must be positive");
  if (history_restart < 2) fail("history_restart must be at least 2");
  if (line_cap < 1) fail("line_cap must be positive");
  if (strategy_cap < 1) fail("strategy_cap must be positive");
  if (players < 2) fail("players must be at least 2");
  if (transport_retries < 0) fail("transport_retries must not be negative");
  if (retry_backoff_seconds < 0) fail("retry_backoff_seconds must not be negative");
  if (!(analyzer_timeout_seconds > 0)) fail("analyzer_timeout_seconds must be positive");
  if (allowlist.empty()) fail("allowlist must name at least one block family");
  if (session_dir.empty()) fail("session_dir must be set");
  solver.Validate();
}

std::vector<std::string> AllowlistPreset(const std::string& name) {
  std::vector<std::string> base{"Random", "BestResponse", "ZeroSumNE", "UniformMixing", "Mix",
                                "OptimalMixing"};
  if (name == "pre2007") return base;
  if (name == "all") {
    base.push_back("StationaryPoint");
    return base;
  }
  throw std::invalid_argument("unknown allowlist preset '" + name + "'");
}

DiscoveryConfig DiscoveryConfigFromJson(const nlohmann::json& j) {
  DiscoveryConfig c;
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.temperature = j.value("temperature", c.temperature);
  c.max_rounds = j.value("max_rounds", c.max_rounds);
  c.duplicate_threshold = j.value("duplicate_threshold", c.duplicate_threshold);
  c.history_restart = j.value("history_restart", c.history_restart);
  c.line_cap = j.value("line_cap", c.line_cap);
  c.strategy_cap = j.value("strategy_cap", c.strategy_cap);
  if (j.contains("allowlist")) {
    const auto& a = j.at("allowlist");
    c.allowlist = a.is_string() ? AllowlistPreset(a.get<std::string>())
                                : a.get<std::vector<std::string>>();
  } else {
    c.allowlist = AllowlistPreset("all");
  }
  c.require_stationary_point = j.value("require_stationary_point", c.require_stationary_point);
  c.restart_clears_dedup = j.value("restart_clears_dedup", c.restart_clears_dedup);
  c.players = j.value("players", c.players);
  c.transport_retries = j.value("transport_retries", c.transport_retries);
  c.retry_backoff_seconds = j.value("retry_backoff_seconds", c.retry_backoff_seconds);
  c.analyzer_timeout_seconds = j.value("analyzer_timeout_seconds", c.analyzer_timeout_seconds);
  c.session_dir = j.value("session_dir", c.session_dir);
  c.stop_file = j.value("stop_file", c.stop_file);
  c.payload_template = j.value("payload_template", c.payload_template);
  c.response_pointer = j.value("response_pointer", c.response_pointer);
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    c.solver.restarts = s.value("restarts", c.solver.restarts);
    c.solver.seed = s.value("seed", c.solver.seed);
    c.solver.tolerance = s.value("tolerance", c.solver.tolerance);
  }
  c.Validate();
  return c;
}

nlohmann::json DiscoveryConfigToJson(const DiscoveryConfig& c) {
  return nlohmann::json{{"endpoint", c.endpoint},
                        {"model", c.model},
                        {"api_key_env", c.api_key_env},
                        {"temperature", c.temperature},
                        {"max_rounds", c.max_rounds},
                        {"duplicate_threshold", c.duplicate_threshold},
                        {"history_restart", c.history_restart},
                        {"line_cap", c.line_cap},
                        {"strategy_cap", c.strategy_cap},
                        {"allowlist", c.allowlist},
                        {"require_stationary_point", c.require_stationary_point},
                        {"restart_clears_dedup", c.restart_clears_dedup},
                        {"players", c.players},
                        {"transport_retries", c.transport_retries},
                        {"retry_backoff_seconds", c.retry_backoff_seconds},
                        {"analyzer_timeout_seconds", c.analyzer_timeout_seconds},
                        {"session_dir", c.session_dir},
                        {"stop_file", c.stop_file},
                        {"payload_template", c.payload_template},
                        {"response_pointer", c.response_pointer},
                        {"solver",
                         {{"restarts", c.solver.restarts},
                          {"seed", c.solver.seed},
                          {"tolerance", c.solver.tolerance}}}};
}

// ---------------------------------------------------------------------------
// Mock transport

std::string MockTransport::Complete(const std::vector<ChatMessage>& messages,
                                    const DiscoveryConfig&) {
  requests_.push_back(messages);
  if (next_ >= script_.size()) throw TransportError("mock script exhausted");
  const std::string& reply = script_[next_++];
  if (reply.rfind("!transport-error", 0) == 0) {
    throw TransportError("scripted transport failure");
  }
  return reply;
}

// ---------------------------------------------------------------------------
// Records

const char* AttemptOutcomeName(AttemptOutcome o) {
  switch (o) {
    case AttemptOutcome::kSyntaxError:
      return "SyntaxError";
    case AttemptOutcome::kAnalyzed:
      return "Analyzed";
    case AttemptOutcome::kDuplicate:
      return "Duplicate";
    case AttemptOutcome::kRejected:
      return "Rejected";
    case AttemptOutcome::kAnalysisError:
      return "AnalysisError";
    case AttemptOutcome::kAnalyzerTimeout:
      return "AnalyzerTimeout";
    case AttemptOutcome::kTransportError:
      return "TransportError";
  }
  return "?";
}

namespace {

AttemptOutcome ParseOutcome(const std::string& s) {
  for (auto o : {AttemptOutcome::kSyntaxError, AttemptOutcome::kAnalyzed,
                 AttemptOutcome::kDuplicate, AttemptOutcome::kRejected,
                 AttemptOutcome::kAnalysisError, AttemptOutcome::kAnalyzerTimeout,
                 AttemptOutcome::kTransportError}) {
    if (s == AttemptOutcomeName(o)) return o;
  }
  throw std::invalid_argument("unknown attempt outcome '" + s + "'");
}

}  // namespace

nlohmann::json AttemptToJson(const AttemptRecord& a) {
  nlohmann::json j{{"round", a.round},
                   {"program", a.program},
                   {"hash", a.hash},
                   {"outcome", AttemptOutcomeName(a.outcome)},
                   {"diagnostics", a.diagnostics},
                   {"timestamp", a.timestamp},
                   {"program_path", a.program_path}};
  if (a.outcome == AttemptOutcome::kAnalyzed) {
    j["bound"] = a.bound;
    j["delta"] = a.delta;
    j["bound_text"] = a.bound_text;
    j["certificate_path"] = a.certificate_path;
  }
  if (!a.message.empty()) j["message"] = a.message;
  if (a.duplicate_of > 0) j["duplicate_of"] = a.duplicate_of;
  return j;
}

AttemptRecord AttemptFromJson(const nlohmann::json& j) {
  AttemptRecord a;
  a.round = j.at("round");
  a.program = j.value("program", "");
  a.hash = j.value("hash", "");
  a.outcome = ParseOutcome(j.at("outcome"));
  a.diagnostics = j.value("diagnostics", std::vector<std::string>{});
  a.timestamp = j.value("timestamp", "");
  a.program_path = j.value("program_path", "");
  a.bound = j.value("bound", 0.0);
  a.delta = j.value("delta", false);
  a.bound_text = j.value("bound_text", "");
  a.certificate_path = j.value("certificate_path", "");
  a.message = j.value("message", "");
  a.duplicate_of = j.value("duplicate_of", 0);
  return a;
}

// ---------------------------------------------------------------------------
// Canonical hashing and reply parsing

std::string CanonicalHash(const SourceProgram& prog) {
  SourceProgram p = prog;
  std::map<std::string, std::string> rename;
  for (auto& st : p.algorithm.statements) {
    for (auto& a : st.args) {
      if (a.kind != Argument::Kind::kIdent) continue;
      auto it = rename.find(a.ident);
      if (it != rename.end()) a.ident = it->second;
    }
    for (auto& out : st.outputs) {
      std::string fresh = "s" + std::to_string(rename.size() + 1);
      rename[out] = fresh;
      out = fresh;
    }
    for (auto& ann : st.annotations) ann.reset();
  }
  if (p.algorithm.return_profile) {
    for (auto& n : *p.algorithm.return_profile) {
      auto it = rename.find(n);
      if (it != rename.end()) n = it->second;
    }
  }
  p.algorithm.name = "algorithm";
  const std::string text = PrettyPrint(p);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExtractProgram(const std::string& reply) {
  std::size_t pos = 0;
  while (true) {
    std::size_t open = reply.find("```", pos);
    if (open == std::string::npos) break;
    std::size_t body = reply.find('\n', open);
    if (body == std::string::npos) break;
    std::size_t close = reply.find("```", body + 1);
    if (close == std::string::npos) break;
    std::string code = reply.substr(body + 1, close - body - 1);
    if (code.find("def ") != std::string::npos) return code;
    pos = close + 3;
  }
  return reply;
}

// ---------------------------------------------------------------------------
// Prompts

namespace {

std::string FamilyOf(LibraryKind k) {
  switch (k) {
    case LibraryKind::kRandom:
      return "Random";
    case LibraryKind::kBestResponse:
      return "BestResponse";
    case LibraryKind::kZeroSumNE:
      return "ZeroSumNE";
    case LibraryKind::kStationaryPoint:
      return "StationaryPoint";
    case LibraryKind::kUniformMixing:
      return "UniformMixing";
    case LibraryKind::kMix:
      return "Mix";
    case LibraryKind::kOptimalMixing:
      return "OptimalMixing";
    case LibraryKind::kIfThenElse:
      return "IfThenElse";
  }
  return "";
}

bool Allowed(const DiscoveryConfig& c, const std::string& family) {
  return family == "OptimalMixing" ||
         std::find(c.allowlist.begin(), c.allowlist.end(), family) != c.allowlist.end();
}

std::string FilteredManifest(const DiscoveryConfig& c) {
  nlohmann::json all = nlohmann::json::parse(BlockManifestJson(c.players));
  nlohmann::json kept = nlohmann::json::array();
  for (const auto& b : all.at("blocks")) {
    auto ref = ParseLibraryName(b.at("name").get<std::string>());
    if (ref && Allowed(c, FamilyOf(ref->kind))) kept.push_back(b);
  }
  return nlohmann::json{{"players", c.players}, {"blocks", kept}}.dump(2);
}

}  // namespace

std::string BuildInitialPrompt(const DiscoveryConfig& c) {
  if (c.allowlist.empty()) {
    throw std::invalid_argument("allowlist must name at least one block family");
  }
  std::ostringstream os;
  os << "Task: design a polynomial-time algorithm that finds an approximate Nash "
        "equilibrium of any "
     << c.players
     << "-player normal-form game whose payoffs lie in [0,1]. Every program you send is "
        "compiled and analyzed automatically. The analyzer answers with compiler "
        "diagnostics or with the approximation bound it can prove. Aim for the smallest "
        "bound you can reach.\n\n";
  os << "Write the algorithm in the building-block language. Rules:\n";
  os << "- Assign every identifier exactly once (single static assignment).\n";
  os << "- Give outputs a type annotation such as `x: Strategy1` when the player is not "
        "obvious from the block.\n";
  os << "- Do not write a return statement. The analyzer appends an optimal mixing of "
        "every strategy you construct.\n";
  if (c.require_stationary_point) {
    os << "- Use at least one StationaryPoint block.\n";
  }
  os << "- Use only the building blocks listed below: " << [&] {
    std::string s;
    for (const auto& a : c.allowlist) s += (s.empty() ? "" : ", ") + a;
    return s;
  }() << ".\n";
  os << "- Stay within " << c.line_cap << " lines and " << c.strategy_cap
     << " strategies.\n\n";
  os << "Building blocks:\n" << FilteredManifest(c) << "\n\n";
  os << "A valid program:\n```\nplayers " << c.players
     << "\ndef algorithm():\n  i = Random1()\n  j = BestResponse2(i)\n"
        "  k = BestResponse1(j)\nend\n```\n\n";
  os << "An invalid program (k is assigned twice, and BestResponse1 receives a player-1 "
        "strategy):\n```\nplayers "
     << c.players
     << "\ndef algorithm():\n  i = Random1()\n  k = BestResponse1(i)\n"
        "  k = Random1()\nend\n```\n\n";
  os << "Reply with exactly one program inside a fenced code block.\n";
  return os.str();
}

std::string BuildFeedbackPrompt(const AttemptRecord& prev, const FeedbackContext& ctx) {
  std::ostringstream os;
  auto best_text = [&] {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5f%s", *ctx.best_bound, ctx.best_delta ? "+δ" : "");
    return std::string(buf);
  };
  switch (prev.outcome) {
    case AttemptOutcome::kSyntaxError:
    case AttemptOutcome::kAnalysisError:
      os << "The analyzer rejected your program:\n";
      for (const auto& d : prev.diagnostics) os << d << "\n";
      if (!prev.message.empty() && prev.diagnostics.empty()) os << prev.message << "\n";
      os << "Fix these errors and send the corrected program.\n";
      break;
    case AttemptOutcome::kRejected:
      os << "The program was not analyzed: " << prev.message << "\n";
      os << "Simplify it and try again.\n";
      break;
    case AttemptOutcome::kAnalyzerTimeout:
      os << "The analysis did not finish in time. Propose a smaller program.\n";
      break;
    case AttemptOutcome::kTransportError:
      os << "Please send your program again.\n";
      break;
    case AttemptOutcome::kDuplicate:
      os << "This program is equivalent to the one from round " << prev.duplicate_of
         << ", which was already analyzed. Propose something different.\n";
      if (ctx.history) {
        os << "Record of past attempts:\n";
        for (const auto& a : *ctx.history) {
          os << "- round " << a.round << ": " << AttemptOutcomeName(a.outcome);
          if (a.outcome == AttemptOutcome::kAnalyzed) os << ", bound " << a.bound_text;
          os << "\n";
        }
      }
      break;
    case AttemptOutcome::kAnalyzed:
      os << "Your program was analyzed. Its certified bound is " << prev.bound_text << ".\n";
      break;
  }
  if (ctx.best_bound) os << "The best bound so far is " << best_text() << ".\n";
  if (prev.outcome == AttemptOutcome::kAnalyzed || prev.outcome == AttemptOutcome::kDuplicate) {
    os << "Try to obtain a smaller bound. Some directions:\n"
          "1. Combine richer blocks, such as equilibria of auxiliary zero-sum games or "
          "stationary points.\n"
          "2. Treat the players asymmetrically when that helps.\n"
          "3. Put known blocks together in combinations not tried before.\n"
          "4. Prefer the simplest program that reaches a given bound.\n";
  }
  os << "Reply with exactly one program inside a fenced code block.\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Session

std::size_t SessionReport::Count(AttemptOutcome o) const {
  std::size_t n = 0;
  for (const auto& a : attempts) n += a.outcome == o ? 1 : 0;
  return n;
}

nlohmann::json SessionToJson(const SessionReport& s, const DiscoveryConfig& c) {
  nlohmann::json attempts = nlohmann::json::array();
  for (const auto& a : s.attempts) attempts.push_back(AttemptToJson(a));
  nlohmann::json restarts = nlohmann::json::array();
  for (const auto& r : s.restarts) restarts.push_back({{"round", r.round}, {"reason", r.reason}});
  nlohmann::json best = nullptr;
  if (s.best_round) {
    best = {{"round", *s.best_round}, {"bound", s.best_bound}, {"delta", s.best_delta}};
  }
  return nlohmann::json{{"version", 1},       {"config", DiscoveryConfigToJson(c)},
                        {"attempts", attempts}, {"restarts", restarts},
                        {"best", best},         {"stopped", s.stopped}};
}

std::string SessionTable(const SessionReport& s) {
  std::ostringstream os;
  for (const auto& a : s.attempts) {
    char line[160];
    std::snprintf(line, sizeof line, "round %3d  %-16s %-12s %s\n", a.round,
                  AttemptOutcomeName(a.outcome),
                  a.outcome == AttemptOutcome::kAnalyzed ? a.bound_text.c_str() : "-",
                  a.hash.empty() ? "" : a.hash.substr(0, 8).c_str());
    os << line;
  }
  for (const auto& r : s.restarts) {
    os << "restart after round " << r.round << " (" << r.reason << ")\n";
  }
  if (s.best_round) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5f%s", s.best_bound, s.best_delta ? "+δ" : "");
    os << "best bound " << buf << " from round " << *s.best_round << "\n";
  } else {
    os << "no analyzed attempt\n";
  }
  if (s.stopped) os << "stopped by the stop file\n";
  return os.str();
}

namespace {

std::string Timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void WriteFile(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, p);
}

int CountCodeLines(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    ++n;
  }
  return n;
}

class Session {
 public:
  Session(const DiscoveryConfig& c, ChatTransport& t) : c_(c), t_(t), dir_(c.session_dir) {}

  SessionReport Run() {
    Resume();
    const fs::path stop = c_.stop_file.empty() ? dir_ / "STOP" : fs::path(c_.stop_file);
    int round = rep_.attempts.empty() ? 1 : rep_.attempts.back().round + 1;
    for (; round <= c_.max_rounds; ++round) {
      if (fs::exists(stop)) {
        rep_.stopped = true;
        break;
      }
      if (static_cast<int>(messages_.size()) >= c_.history_restart) {
        Restart(round - 1, "history");
      }
      if (messages_.empty()) messages_.push_back({"user", BuildInitialPrompt(c_)});
      AttemptRecord a = Attempt(round);
      rep_.attempts.push_back(a);
      Persist();
      if (a.outcome == AttemptOutcome::kTransportError) continue;
      FeedbackContext ctx;
      if (rep_.best_round) {
        ctx.best_bound = rep_.best_bound;
        ctx.best_delta = rep_.best_delta;
      }
      if (a.outcome == AttemptOutcome::kDuplicate) {
        ctx.history = &rep_.attempts;
        if (++consecutive_duplicates_ >= c_.duplicate_threshold) {
          Restart(round, "duplicate");
          Persist();
          continue;
        }
      } else {
        consecutive_duplicates_ = 0;
      }
      messages_.push_back({"user", BuildFeedbackPrompt(a, ctx)});
    }
    Persist();
    return rep_;
  }

 private:
  void Resume() {
    const fs::path p = dir_ / "session.json";
    if (!fs::exists(p)) return;
    nlohmann::json j = nlohmann::json::parse(ReadTextFile(p.string()));
    for (const auto& ja : j.at("attempts")) {
      AttemptRecord a = AttemptFromJson(ja);
      if (a.outcome == AttemptOutcome::kAnalyzed) {
        seen_[a.hash] = a.round;
        UpdateBest(a);
      }
      rep_.attempts.push_back(std::move(a));
    }
    for (const auto& jr : j.value("restarts", nlohmann::json::array())) {
      rep_.restarts.push_back({jr.at("round"), jr.at("reason")});
    }
  }

  void Restart(int after_round, const std::string& reason) {
    messages_.clear();
    consecutive_duplicates_ = 0;
    if (c_.restart_clears_dedup) seen_.clear();
    rep_.restarts.push_back({after_round, reason});
  }

  void UpdateBest(const AttemptRecord& a) {
    if (!rep_.best_round || a.bound < rep_.best_bound) {
      rep_.best_round = a.round;
      rep_.best_bound = a.bound;
      rep_.best_delta = a.delta;
    }
  }

  std::string Request() {
    for (int attempt = 0;; ++attempt) {
      try {
        return t_.Complete(messages_, c_);
      } catch (const TransportError&) {
        if (attempt >= c_.transport_retries) throw;
        double wait = c_.retry_backoff_seconds * static_cast<double>(1 << attempt);
        if (wait > 0) std::this_thread::sleep_for(std::chrono::duration<double>(wait));
      }
    }
  }

  AttemptRecord Attempt(int round) {
    AttemptRecord a;
    a.round = round;
    a.timestamp = Timestamp();
    char stem[16];
    std::snprintf(stem, sizeof stem, "%03d", round);
    std::string reply;
    try {
      reply = Request();
    } catch (const TransportError& e) {
      a.outcome = AttemptOutcome::kTransportError;
      a.message = e.what();
      return a;
    }
    messages_.push_back({"assistant", reply});
    a.program = ExtractProgram(reply);
    a.program_path = std::string("attempts/") + stem + ".lne";

    ParseResult parsed = ParseAndCheck(a.program);
    if (!parsed.program) {
      a.outcome = AttemptOutcome::kSyntaxError;
      for (const auto& d : parsed.diagnostics) a.diagnostics.push_back(d.ToString("program"));
      WriteFile(dir_ / a.program_path, a.program);
      return a;
    }
    SourceProgram prog = std::move(*parsed.program);
    if (!prog.algorithm.return_profile) prog.options.auto_return_optimal_mixing = true;
    const std::string canonical = PrettyPrint(prog);
    WriteFile(dir_ / a.program_path, canonical);
    a.hash = CanonicalHash(prog);
    if (auto it = seen_.find(a.hash); it != seen_.end()) {
      a.outcome = AttemptOutcome::kDuplicate;
      a.duplicate_of = it->second;
      return a;
    }
    if (std::string why = CheckCaps(prog, a.program); !why.empty()) {
      a.outcome = AttemptOutcome::kRejected;
      a.message = why;
      return a;
    }
    try {
      CompiledProgram compiled = CompileChecked(prog, "round-" + std::string(stem));
      SolverConfig sc = c_.solver;
      sc.time_limit_seconds = c_.analyzer_timeout_seconds;
      BoundCertificate cert = SolveBuiltin(compiled.problem, sc);
      if (!cert.valid) {
        a.outcome = AttemptOutcome::kAnalysisError;
        a.message = "the solver could not certify a bound";
        return a;
      }
      a.outcome = AttemptOutcome::kAnalyzed;
      a.bound = cert.bound;
      a.delta = cert.delta_flag;
      a.bound_text = cert.BoundString();
      a.certificate_path = std::string("attempts/") + stem + ".cert.json";
      nlohmann::json jc = CertificateToJson(cert);
      jc["source"] = std::string(stem) + ".lne";
      WriteFile(dir_ / a.certificate_path, jc.dump(2) + "\n");
      seen_[a.hash] = round;
      UpdateBest(a);
    } catch (const SolverError& e) {
      a.outcome = e.kind() == "Timeout" ? AttemptOutcome::kAnalyzerTimeout
                                        : AttemptOutcome::kAnalysisError;
      a.message = e.what();
    } catch (const std::exception& e) {
      a.outcome = AttemptOutcome::kAnalysisError;
      a.message = e.what();
      a.diagnostics.push_back(std::string("error: ") + e.what());
    }
    return a;
  }

  std::string CheckCaps(const SourceProgram& prog, const std::string& text) const {
    if (prog.player_count != c_.players) {
      return "the program declares " + std::to_string(prog.player_count) +
             " players; the session targets " + std::to_string(c_.players);
    }
    int lines = CountCodeLines(text);
    if (lines > c_.line_cap) {
      return "the program has " + std::to_string(lines) + " lines; the limit is " +
             std::to_string(c_.line_cap);
    }
    std::size_t strategies = StrategyVariables(prog).size();
    if (static_cast<int>(strategies) > c_.strategy_cap) {
      return "the program constructs " + std::to_string(strategies) +
             " strategies; the limit is " + std::to_string(c_.strategy_cap);
    }
    bool has_sp = false;
    for (const auto& st : prog.algorithm.statements) {
      auto ref = ParseLibraryName(st.block);
      if (!ref) continue;
      const std::string family = FamilyOf(ref->kind);
      has_sp = has_sp || ref->kind == LibraryKind::kStationaryPoint;
      if (!Allowed(c_, family)) return "block family " + family + " is not allowed";
    }
    if (c_.require_stationary_point && !has_sp) {
      return "the program must use a StationaryPoint block";
    }
    return "";
  }

  void Persist() {
    WriteFile(dir_ / "session.json", SessionToJson(rep_, c_).dump(2) + "\n");
  }

  const DiscoveryConfig& c_;
  ChatTransport& t_;
  fs::path dir_;
  SessionReport rep_;
  std::vector<ChatMessage> messages_;
  std::map<std::string, int> seen_;
  int consecutive_duplicates_ = 0;
};

}  // namespace

SessionReport RunLoop(const DiscoveryConfig& config, ChatTransport& transport) {
  config.Validate();
  return Session(config, transport).Run();
}

}  // namespace legone
