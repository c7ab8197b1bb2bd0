// Copyright 2026 The glagent Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "glagent/llm/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <httplib.h>

#include "glagent/error.hpp"
#include "glagent/json.hpp"

namespace glagent::llm {

namespace {

long optional_count(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return -1;
  const long v = j.at(key).get<long>();
  if (v < 0) throw Error(ErrorCode::SchemaViolation, std::string("fixture rule: negative ") + key);
  return v;
}

}  // namespace

std::vector<FixtureRule> parse_fixture_rules(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("fixture file: ") + e.what());
  }
  const Json& arr = doc.is_object() && doc.contains("rules") ? doc.at("rules") : doc;
  if (!arr.is_array()) throw Error(ErrorCode::SchemaViolation, "fixture file: expected an array of rules");
  std::vector<FixtureRule> rules;
  std::size_t n = 0;
  for (const auto& r : arr) {
    ++n;
    try {
      FixtureRule rule;
      rule.match_template_id = r.at("template").get<std::string>();
      if (r.contains("contains") && !r.at("contains").is_null()) rule.match_contains = r.at("contains").get<std::string>();
      rule.response_text = r.at("response").get<std::string>();
      rule.prompt_tokens = optional_count(r, "prompt_tokens");
      rule.completion_tokens = optional_count(r, "completion_tokens");
      rule.latency_ms = r.value("latency_ms", 0.0);
      if (rule.latency_ms < 0) throw Error(ErrorCode::SchemaViolation, "fixture rule: negative latency_ms");
      rules.push_back(std::move(rule));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, "fixture rule " + std::to_string(n) + ": " + e.what());
    }
  }
  return rules;
}

std::vector<FixtureRule> load_fixture_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read fixture file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_fixture_rules(ss.str());
}

void MockBackend::register_fixture(std::vector<FixtureRule> rules) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : rules) {
    // An absent substring and an empty one are different keys.
    const std::string c = r.match_contains ? "=" + *r.match_contains : "";
    if (!seen.insert({r.match_template_id, c}).second)
      throw Error(ErrorCode::DuplicateRule,
                  r.match_template_id + (r.match_contains ? " / '" + *r.match_contains + "'" : ""));
  }
  rules_ = std::move(rules);
}

CompletionResponse MockBackend::complete(const CompletionRequest& request) {
  for (const auto& r : rules_) {
    if (r.match_template_id != request.template_id) continue;
    if (r.match_contains && request.prompt_text.find(*r.match_contains) == std::string::npos) continue;
    return CompletionResponse{r.response_text, r.prompt_tokens, r.completion_tokens, r.latency_ms};
  }
  throw Error(ErrorCode::NoFixtureMatch, request.template_id);
}

HttpSettings HttpSettings::from_env() {
  HttpSettings s;
  if (const char* v = std::getenv("GLAGENT_API_BASE")) s.base_url = v;
  if (const char* v = std::getenv("GLAGENT_API_KEY")) s.api_key = v;
  if (const char* v = std::getenv("GLAGENT_MODEL"); v && *v) s.model = v;
  return s;
}

HttpBackend::HttpBackend(HttpSettings settings) : settings_(std::move(settings)) {
  if (settings_.base_url.empty()) throw Error(ErrorCode::MissingCredentials, "GLAGENT_API_BASE is not set");
  if (settings_.api_key.empty()) throw Error(ErrorCode::MissingCredentials, "GLAGENT_API_KEY is not set");
}

std::string HttpBackend::request_body(const CompletionRequest& request) const {
  Json body{{"model", settings_.model},
            {"messages", Json::array({Json{{"role", "user"}, {"content", request.prompt_text}}})},
            {"temperature", request.temperature},
            {"max_tokens", request.max_output_tokens}};
  return body.dump();
}

CompletionResponse HttpBackend::parse_response(const std::string& body) {
  CompletionResponse r;
  try {
    const Json j = Json::parse(body);
    r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage") && j.at("usage").is_object()) {
      r.prompt_tokens = j.at("usage").value("prompt_tokens", -1L);
      r.completion_tokens = j.at("usage").value("completion_tokens", -1L);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::BackendUnreachable, std::string("unreadable completion response: ") + e.what());
  }
  return r;
}

CompletionResponse HttpBackend::complete(const CompletionRequest& request) {
  // Split "scheme://host[:port]/prefix" into the client origin and path prefix.
  const std::string& base = settings_.base_url;
  const auto scheme_end = base.find("://");
  const auto path_start = base.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = path_start == std::string::npos ? base : base.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : base.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (origin.rfind("https://", 0) == 0)
    throw Error(ErrorCode::BackendUnreachable, "https endpoints need a build with GLAGENT_WITH_OPENSSL=ON");
#endif
  httplib::Client client(origin);
  client.set_connection_timeout(settings_.timeout_seconds, 0);
  client.set_read_timeout(settings_.timeout_seconds, 0);
  const httplib::Headers headers{{"Authorization", "Bearer " + settings_.api_key}};
  const std::string body = request_body(request);

  std::string last_error;
  for (int attempt = 0; attempt <= settings_.retries; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(prefix + "/chat/completions", headers, body, "application/json");
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server returned " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw Error(ErrorCode::BackendUnreachable, "server returned " + std::to_string(res->status) + ": " + res->body);
    CompletionResponse r = parse_response(res->body);
    r.latency_ms = ms;
    return r;
  }
  throw Error(ErrorCode::BackendUnreachable, last_error);
}

}  // namespace glagent::llm
