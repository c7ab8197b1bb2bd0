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

#include <string>
#include <vector>

#include "glagent/json.hpp"
#include "glagent/llm/client.hpp"
#include "glagent/memory/memory_store.hpp"

namespace glagent::agents {

struct CostRow {
  std::string stage;
  double wall_seconds = 0.0;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  double cost_usd = 0.0;
};

struct CostReport {
  std::vector<CostRow> rows;  // one per stage, in pipeline order
  CostRow total;              // cost_usd is the sum over call records
  llm::RateCard rate_card;
  std::vector<std::string> warnings;

  Json to_json() const;
  std::string to_text() const;
};

// Rate card from the bundle's engine/rate_card entry when present. A call
// whose recorded cost differs from tokens x rate by more than 1e-9 USD is
// reported as a warning.
CostReport cost_report(const memory::RunBundle& bundle);

}  // namespace glagent::agents
