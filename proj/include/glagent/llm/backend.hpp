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

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace glagent::llm {

struct CompletionRequest {
  std::string template_id;
  std::string prompt_text;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::string backend_id;
};

struct CompletionResponse {
  std::string text;
  long prompt_tokens = -1;  // -1: backend gave no usage, the client estimates
  long completion_tokens = -1;
  double latency_ms = 0.0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  // True when latency_ms is declared rather than measured.
  virtual bool simulated() const = 0;
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

struct FixtureRule {
  std::string match_template_id;
  std::optional<std::string> match_contains;
  std::string response_text;
  long prompt_tokens = -1;
  long completion_tokens = -1;
  double latency_ms = 0.0;
};

// Reads a fixture document: an array of rule objects, or {"rules": [...]}.
std::vector<FixtureRule> load_fixture_file(const std::filesystem::path& path);
std::vector<FixtureRule> parse_fixture_rules(const std::string& text);

// Resolves a prompt against ordered rules; the first rule whose template id
// matches and whose substring (if any) occurs in the prompt wins.
class MockBackend final : public Backend {
 public:
  MockBackend() = default;
  explicit MockBackend(std::vector<FixtureRule> rules) { register_fixture(std::move(rules)); }

  // Replaces the active rule set. DuplicateRule on a repeated (template, contains) pair.
  void register_fixture(std::vector<FixtureRule> rules);
  const std::vector<FixtureRule>& rules() const { return rules_; }

  std::string id() const override { return "mock"; }
  bool simulated() const override { return true; }
  CompletionResponse complete(const CompletionRequest& request) override;

 private:
  std::vector<FixtureRule> rules_;
};

struct HttpSettings {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  int retries = 1;
  int timeout_seconds = 60;

  // GLAGENT_API_BASE, GLAGENT_API_KEY, GLAGENT_MODEL.
  static HttpSettings from_env();
};

// Chat-completion client: POST {base}/chat/completions.
class HttpBackend final : public Backend {
 public:
  // MissingCredentials when base URL or key is empty.
  explicit HttpBackend(HttpSettings settings);

  std::string id() const override { return "http:" + settings_.model; }
  bool simulated() const override { return false; }
  CompletionResponse complete(const CompletionRequest& request) override;

  // Request body and response parsing, exposed for tests.
  std::string request_body(const CompletionRequest& request) const;
  static CompletionResponse parse_response(const std::string& body);

 private:
  HttpSettings settings_;
};

}  // namespace glagent::llm
