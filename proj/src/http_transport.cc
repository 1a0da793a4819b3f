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

#include <cstdlib>
#include <regex>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "legone/discovery.h"

namespace legone {

std::string HttpTransport::Complete(const std::vector<ChatMessage>& messages,
                                    const DiscoveryConfig& config) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config.endpoint, m, kUrl)) {
    throw TransportError("endpoint '" + config.endpoint + "' is not an http(s) URL");
  }
  const std::string base = m[1];
  const std::string path = m[2].matched ? std::string(m[2]) : "/";

  nlohmann::json body = config.payload_template.is_object() ? config.payload_template
                                                            : nlohmann::json::object();
  body["model"] = config.model;
  body["temperature"] = config.temperature;
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& msg : messages) msgs.push_back({{"role", msg.role}, {"content", msg.content}});
  body["messages"] = msgs;

  httplib::Headers headers;
  if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Client client(base);
  client.set_connection_timeout(30);
  client.set_read_timeout(300);
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 500));
  }
  try {
    nlohmann::json reply = nlohmann::json::parse(res->body);
    return reply.at(nlohmann::json::json_pointer(config.response_pointer)).get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed response: ") + e.what());
  }
}

}  // namespace legone
