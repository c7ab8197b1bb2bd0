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

#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "glagent/clock.hpp"
#include "glagent/json.hpp"
#include "glagent/llm/backend.hpp"
#include "glagent/llm/prompts.hpp"

namespace glagent::llm {

// USD per 1000 tokens.
struct RateCard {
  double usd_per_1k_prompt = 0.0015;
  double usd_per_1k_completion = 0.002;

  double cost(long prompt_tokens, long completion_tokens) const {
    return static_cast<double>(prompt_tokens) * usd_per_1k_prompt / 1000.0 +
           static_cast<double>(completion_tokens) * usd_per_1k_completion / 1000.0;
  }
  Json to_json() const;
  static RateCard from_json(const Json& j);
};

struct LlmCallRecord {
  std::string template_id;
  std::string prompt_text;
  std::string response_text;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  double latency_ms = 0.0;
  double cost_usd = 0.0;
  std::string backend_id;

  Json to_json() const;
  static LlmCallRecord from_json(const Json& j);
  friend bool operator==(const LlmCallRecord&, const LlmCallRecord&) = default;
};

// ceil(characters / 4).
long estimate_tokens(const std::string& text);

class LlmClient {
 public:
  LlmClient(std::shared_ptr<Backend> backend, RateCard rates = {}, Clock* clock = nullptr,
            const PromptRegistry* registry = nullptr);

  // One exchange; the record is appended to the call log.
  std::pair<std::string, LlmCallRecord> complete(const CompletionRequest& request);
  // Renders a registered template, then completes it.
  std::pair<std::string, LlmCallRecord> complete_template(const std::string& template_id,
                                                          const Bindings& bindings);

  std::vector<LlmCallRecord> call_log() const;
  const RateCard& rates() const { return rates_; }
  Backend& backend() { return *backend_; }
  const PromptRegistry& registry() const { return *registry_; }
  double temperature = 0.0;

 private:
  std::shared_ptr<Backend> backend_;
  RateCard rates_;
  Clock* clock_;
  const PromptRegistry* registry_;
  mutable std::mutex mu_;
  std::vector<LlmCallRecord> log_;
};

}  // namespace glagent::llm
