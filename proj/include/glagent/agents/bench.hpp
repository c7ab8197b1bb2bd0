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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "glagent/agents/task_plan.hpp"
#include "glagent/json.hpp"
#include "glagent/llm/backend.hpp"
#include "glagent/llm/client.hpp"

namespace glagent::agents {

// Per-item labels for the robustness corpus.
struct GoldItem {
  std::string provenance;  // paper | fixture
  TaskPlan task_plan;
  std::string transform;
  std::vector<std::string> modules;
  std::string algorithm;
  std::vector<std::string> hyperparam_keys;
};

// {"items": {id: {...}}}. SchemaViolation on anything malformed.
std::map<std::string, GoldItem> parse_gold(const Json& j);

inline const std::vector<std::string>& bench_agents() {
  static const std::vector<std::string> a = {"manager", "data", "configuration", "searching", "tuning"};
  return a;
}

struct ItemResult {
  std::string id;
  Variant variant = Variant::Unlabeled;
  bool scored = false;
  std::map<std::string, double> scores;  // agent -> 0 or 1
  Json diffs = Json::object();           // agent -> what differed or failed
};

struct RobustnessReport {
  std::vector<ItemResult> items;
  // variant -> agent -> mean score over scored items of that variant.
  std::map<std::string, std::map<std::string, double>> per_variant;
  std::map<std::string, double> per_agent;
  std::size_t scored = 0;
  std::size_t unlabeled = 0;

  Json to_json() const;
  std::string to_text() const;
};

struct BenchOptions {
  bool paper_only = false;
  std::uint64_t seed = 0;
  int search_budget = 2;
  int tune_budget = 2;
  int epochs = 20;
  int diff_steps = 20;
  int hidden_dim = 8;
  llm::RateCard rate_card;
};

// Each scored item runs every agent in an isolated memory. Stages after the
// manager receive the gold plan, so a manager mistake is charged once.
// SchemaViolation when a corpus item has no id or the gold names an id the
// corpus lacks.
RobustnessReport bench_robustness(const std::vector<Instruction>& corpus, const std::map<std::string, GoldItem>& gold,
                                  std::shared_ptr<llm::Backend> backend, const BenchOptions& opts = {});

}  // namespace glagent::agents
