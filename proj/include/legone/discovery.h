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

#ifndef LEGONE_DISCOVERY_H_
#define LEGONE_DISCOVERY_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legone/dsl.h"
#include "legone/solver.h"

namespace legone {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DiscoveryConfig {
  std::string endpoint;  // e.g. https://host/v1/chat/completions
  std::string model = "default";
  std::string api_key_env = "LEGONE_API_KEY";
  double temperature = 0.8;
  int max_rounds = 20;
  int duplicate_threshold = 3;
  int history_restart = 20;  // messages kept before the chat is restarted
  int line_cap = 60;
  int strategy_cap = 12;
  std::vector<std::string> allowlist;  // block families, e.g. "BestResponse"
  bool require_stationary_point = false;
  bool restart_clears_dedup = false;
  int players = 2;
  int transport_retries = 2;
  double retry_backoff_seconds = 1.0;
  double analyzer_timeout_seconds = 100.0;
  std::string session_dir = "session";
  std::string stop_file;  // defaults to <session_dir>/STOP
  // Extra fields merged into every request body, and the JSON pointer of the
  // reply text in the response.
  nlohmann::json payload_template = nlohmann::json::object();
  std::string response_pointer = "/choices/0/message/content";
  SolverConfig solver;

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

DiscoveryConfig DiscoveryConfigFromJson(const nlohmann::json& j);
nlohmann::json DiscoveryConfigToJson(const DiscoveryConfig& c);

// Block families available before 2007 ("pre2007") or all families ("all").
std::vector<std::string> AllowlistPreset(const std::string& name);

struct ChatMessage {
  std::string role;
  std::string content;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  // Returns the reply text. Throws TransportError.
  virtual std::string Complete(const std::vector<ChatMessage>& messages,
                               const DiscoveryConfig& config) = 0;
};

// Chat-completions style JSON over HTTP(S).
class HttpTransport : public ChatTransport {
 public:
  std::string Complete(const std::vector<ChatMessage>& messages,
                       const DiscoveryConfig& config) override;
};

// Replays scripted replies in order. A reply starting with "!transport-error"
// raises TransportError instead; running past the script does too.
class MockTransport : public ChatTransport {
 public:
  explicit MockTransport(std::vector<std::string> script) : script_(std::move(script)) {}
  std::string Complete(const std::vector<ChatMessage>& messages,
                       const DiscoveryConfig& config) override;

  const std::vector<std::vector<ChatMessage>>& requests() const { return requests_; }

 private:
  std::vector<std::string> script_;
  std::size_t next_ = 0;
  std::vector<std::vector<ChatMessage>> requests_;
};

enum class AttemptOutcome {
  kSyntaxError,
  kAnalyzed,
  kDuplicate,
  kRejected,
  kAnalysisError,
  kAnalyzerTimeout,
  kTransportError,
};
const char* AttemptOutcomeName(AttemptOutcome o);

struct AttemptRecord {
  int round = 0;
  std::string program;  // program text as proposed
  std::string hash;     // canonical hash, empty when the program did not parse
  AttemptOutcome outcome = AttemptOutcome::kSyntaxError;
  std::vector<std::string> diagnostics;
  double bound = 0;
  bool delta = false;
  std::string bound_text;
  std::string program_path;      // relative to the session directory
  std::string certificate_path;  // relative; analyzed attempts only
  std::string timestamp;
  std::string message;
  int duplicate_of = 0;  // round of the earlier attempt with the same hash
};

nlohmann::json AttemptToJson(const AttemptRecord& a);
AttemptRecord AttemptFromJson(const nlohmann::json& j);

// Rename-invariant hash: strategy identifiers are renumbered in order of
// definition and the algorithm name is dropped before printing canonically.
std::string CanonicalHash(const SourceProgram& prog);

// Code inside the first fenced block containing "def", or the whole text.
std::string ExtractProgram(const std::string& reply);

std::string BuildInitialPrompt(const DiscoveryConfig& config);

struct FeedbackContext {
  std::optional<double> best_bound;
  bool best_delta = false;
  // Past attempts, shown when the previous proposal was a duplicate.
  const std::vector<AttemptRecord>* history = nullptr;
};
std::string BuildFeedbackPrompt(const AttemptRecord& previous, const FeedbackContext& ctx);

struct RestartEvent {
  int round = 0;
  std::string reason;  // "duplicate" or "history"
};

struct SessionReport {
  std::vector<AttemptRecord> attempts;
  std::vector<RestartEvent> restarts;
  std::optional<int> best_round;
  double best_bound = 0;
  bool best_delta = false;
  bool stopped = false;  // ended by the stop file

  std::size_t Count(AttemptOutcome o) const;
};

nlohmann::json SessionToJson(const SessionReport& s, const DiscoveryConfig& c);
std::string SessionTable(const SessionReport& s);

// Runs the propose, compile, analyze, feedback loop. Resumes from an
// existing session.json in the session directory.
SessionReport RunLoop(const DiscoveryConfig& config, ChatTransport& transport);

}  // namespace legone

#endif  // LEGONE_DISCOVERY_H_
