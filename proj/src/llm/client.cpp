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

#include "glagent/llm/client.hpp"

#include "glagent/error.hpp"

namespace glagent::llm {

Json RateCard::to_json() const {
  return Json{{"usd_per_1k_prompt", usd_per_1k_prompt}, {"usd_per_1k_completion", usd_per_1k_completion}};
}

RateCard RateCard::from_json(const Json& j) {
  RateCard r;
  r.usd_per_1k_prompt = j.value("usd_per_1k_prompt", r.usd_per_1k_prompt);
  r.usd_per_1k_completion = j.value("usd_per_1k_completion", r.usd_per_1k_completion);
  if (r.usd_per_1k_prompt < 0 || r.usd_per_1k_completion < 0)
    throw Error(ErrorCode::InvalidConfig, "rate card entries must be nonnegative");
  return r;
}

Json LlmCallRecord::to_json() const {
  return Json{{"template_id", template_id},     {"prompt_text", prompt_text},
              {"response_text", response_text}, {"prompt_tokens", prompt_tokens},
              {"completion_tokens", completion_tokens}, {"latency_ms", latency_ms},
              {"cost_usd", cost_usd},           {"backend_id", backend_id}};
}

LlmCallRecord LlmCallRecord::from_json(const Json& j) {
  LlmCallRecord r;
  r.template_id = j.at("template_id").get<std::string>();
  r.prompt_text = j.at("prompt_text").get<std::string>();
  r.response_text = j.at("response_text").get<std::string>();
  r.prompt_tokens = j.at("prompt_tokens").get<long>();
  r.completion_tokens = j.at("completion_tokens").get<long>();
  r.latency_ms = j.at("latency_ms").get<double>();
  r.cost_usd = j.at("cost_usd").get<double>();
  r.backend_id = j.at("backend_id").get<std::string>();
  return r;
}

long estimate_tokens(const std::string& text) { return static_cast<long>((text.size() + 3) / 4); }

LlmClient::LlmClient(std::shared_ptr<Backend> backend, RateCard rates, Clock* clock, const PromptRegistry* registry)
    : backend_(std::move(backend)), rates_(rates), clock_(clock), registry_(registry ? registry : &default_registry()) {
  if (!backend_) throw Error(ErrorCode::InvalidConfig, "no LLM backend configured");
}

std::pair<std::string, LlmCallRecord> LlmClient::complete(const CompletionRequest& request) {
  if (request.prompt_text.empty()) throw Error(ErrorCode::InvalidParameter, "empty prompt");
  if (request.temperature < 0 || request.temperature > 1)
    throw Error(ErrorCode::InvalidParameter, "temperature must lie in [0, 1]");
  if (request.max_output_tokens < 1) throw Error(ErrorCode::InvalidParameter, "max_output_tokens must be positive");

  const double start = clock_ ? clock_->now_ms() : 0.0;
  CompletionResponse resp = backend_->complete(request);
  LlmCallRecord rec;
  rec.template_id = request.template_id;
  rec.prompt_text = request.prompt_text;
  rec.response_text = resp.text;
  rec.prompt_tokens = resp.prompt_tokens >= 0 ? resp.prompt_tokens : estimate_tokens(request.prompt_text);
  rec.completion_tokens = resp.completion_tokens >= 0 ? resp.completion_tokens : estimate_tokens(resp.text);
  if (backend_->simulated() || !clock_) {
    rec.latency_ms = resp.latency_ms;
    if (clock_) clock_->advance(resp.latency_ms);
  } else {
    rec.latency_ms = clock_->now_ms() - start;
  }
  rec.cost_usd = rates_.cost(rec.prompt_tokens, rec.completion_tokens);
  rec.backend_id = backend_->id();
  {
    std::lock_guard<std::mutex> lock(mu_);
    log_.push_back(rec);
  }
  return {resp.text, std::move(rec)};
}

std::pair<std::string, LlmCallRecord> LlmClient::complete_template(const std::string& template_id,
                                                                   const Bindings& bindings) {
  CompletionRequest req;
  req.template_id = template_id;
  req.prompt_text = registry_->render(template_id, bindings);
  req.temperature = temperature;
  req.backend_id = backend_->id();
  return complete(req);
}

std::vector<LlmCallRecord> LlmClient::call_log() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_;
}

}  // namespace glagent::llm
