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

#include "glagent/agents/cost_report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "glagent/llm/prompts.hpp"

namespace glagent::agents {

namespace {

constexpr double kCostTolerance = 1e-9;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

CostReport cost_report(const memory::RunBundle& bundle) {
  CostReport r;
  auto engine = bundle.entries.find("engine");
  if (engine != bundle.entries.end()) {
    auto rc = engine->second.find("rate_card");
    if (rc != engine->second.end()) r.rate_card = llm::RateCard::from_json(rc->second);
  }

  std::vector<std::string> order = {"manager", "data", "configuration", "searching", "tuning", "response"};
  std::map<std::string, CostRow> rows;
  for (const auto& s : order) rows[s].stage = s;
  for (std::size_t i = 0; i < bundle.call_records.size(); ++i) {
    const auto& c = bundle.call_records[i];
    const std::string stage = llm::stage_of(c.template_id);
    if (!rows.count(stage)) {
      rows[stage].stage = stage;
      order.push_back(stage);
    }
    CostRow& row = rows[stage];
    row.prompt_tokens += c.prompt_tokens;
    row.completion_tokens += c.completion_tokens;
    row.cost_usd += c.cost_usd;
    r.total.prompt_tokens += c.prompt_tokens;
    r.total.completion_tokens += c.completion_tokens;
    r.total.cost_usd += c.cost_usd;
    const double expected = r.rate_card.cost(c.prompt_tokens, c.completion_tokens);
    if (std::fabs(expected - c.cost_usd) > kCostTolerance)
      r.warnings.push_back("call " + std::to_string(i) + " (" + c.template_id + "): recorded cost " +
                           fmt("%.9g", c.cost_usd) + " USD, tokens x rate give " + fmt("%.9g", expected) + " USD");
  }
  for (const auto& s : order) {
    CostRow& row = rows[s];
    auto ns = bundle.entries.find(s);
    if (ns != bundle.entries.end()) {
      auto w = ns->second.find("wall_ms");
      if (w != ns->second.end() && w->second.is_number()) row.wall_seconds = w->second.get<double>() / 1000.0;
    }
    r.total.wall_seconds += row.wall_seconds;
    r.rows.push_back(row);
  }
  r.total.stage = "total";
  return r;
}

Json CostReport::to_json() const {
  auto row_json = [](const CostRow& r) {
    return Json{{"stage", r.stage},
                {"wall_seconds", r.wall_seconds},
                {"prompt_tokens", r.prompt_tokens},
                {"completion_tokens", r.completion_tokens},
                {"tokens", r.prompt_tokens + r.completion_tokens},
                {"cost_usd", r.cost_usd}};
  };
  Json rows_j = Json::array();
  for (const auto& r : rows) rows_j.push_back(row_json(r));
  return Json{{"rows", rows_j}, {"total", row_json(total)}, {"rate_card", rate_card.to_json()}, {"warnings", warnings}};
}

std::string CostReport::to_text() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %10s %10s %10s %10s %12s\n", "stage", "time_s", "prompt", "completion",
                "tokens", "cost_usd");
  out << line;
  auto emit = [&](const CostRow& r) {
    std::snprintf(line, sizeof line, "%-14s %10.3f %10ld %10ld %10ld %12.6f\n", r.stage.c_str(), r.wall_seconds,
                  r.prompt_tokens, r.completion_tokens, r.prompt_tokens + r.completion_tokens, r.cost_usd);
    out << line;
  };
  for (const auto& r : rows) emit(r);
  emit(total);
  for (const auto& w : warnings) out << "warning: integrity: " << w << "\n";
  return out.str();
}

}  // namespace glagent::agents
