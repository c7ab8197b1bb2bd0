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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "glagent/agents/config.hpp"
#include "glagent/agents/task_plan.hpp"
#include "glagent/catalog/catalog.hpp"
#include "glagent/clock.hpp"
#include "glagent/engine/dataset.hpp"
#include "glagent/engine/model.hpp"
#include "glagent/genotype.hpp"
#include "glagent/hpo/hpo.hpp"
#include "glagent/llm/client.hpp"
#include "glagent/memory/memory_store.hpp"
#include "glagent/search/search.hpp"

namespace glagent::agents {

// What every agent works with. Each LLM exchange is appended to the memory's
// call records and logged as an event of the calling agent.
struct AgentContext {
  llm::LlmClient& llm;
  memory::MemoryStore& memory;
  const catalog::Catalog& catalog;
  const Clock* clock = nullptr;
  bool reprompt = false;
};

// Sends a rendered template and returns the parsed block. With ctx.reprompt,
// a response without a readable block is asked for once more.
Json ask_structured(AgentContext& ctx, const std::string& agent, const std::string& template_id,
                    const llm::Bindings& bindings, const std::vector<std::string>& expected_keys);
std::string ask_text(AgentContext& ctx, const std::string& agent, const std::string& template_id,
                     const llm::Bindings& bindings);

// manager
TaskPlan extract_task_plan(AgentContext& ctx, const Instruction& instruction);
Instance select_instance(AgentContext& ctx, const TaskPlan& plan);
// UnsupportedTask for plans outside the three instances.
Instance instance_for(const TaskPlan& plan);

// data
std::vector<std::string> select_feature_engineering(AgentContext& ctx, const TaskPlan& plan,
                                                    const Instruction& instruction);
// Applies the transforms in order and records the result under "data".
engine::Dataset prepare_dataset(AgentContext& ctx, engine::Dataset d, const std::vector<std::string>& transforms);

// configuration
std::vector<std::string> select_modules(AgentContext& ctx, const TaskPlan& plan, Instance instance);

struct SpaceOptions {
  int num_blocks = 2;
  int epochs = 100;
  int hidden_dim = 16;
  std::filesystem::path space_file;  // written when non-empty
};

// Catalog lookup and filtering per module. Without an agent context it only
// computes the space; with one it also records it.
SearchSpace build_search_space(const catalog::Catalog& cat, const TaskPlan& plan, Instance instance,
                               const std::vector<std::string>& modules, const SpaceOptions& opts,
                               std::vector<std::string>* notes = nullptr);
SearchSpace assemble_search_space(AgentContext& ctx, const TaskPlan& plan, Instance instance,
                                  const std::vector<std::string>& modules, const SpaceOptions& opts);

enum class Algorithm { Random, Differentiable };
const char* to_string(Algorithm a) noexcept;
Algorithm algorithm_from_string(const std::string& s);

// True when every decision site can be relaxed: no discrete count sites, no
// coarsening or non-differentiable candidates, engine support for every
// aggregation, and more than one genotype.
bool differentiable_gate(const SearchSpace& space, const catalog::Catalog& cat, std::string* why = nullptr);

struct AlgorithmChoice {
  Algorithm algorithm = Algorithm::Random;
  std::string suggested;  // the LLM's recommendation as written
  std::string efficiency = "none";
  std::string reason;
};

AlgorithmChoice select_algorithm(AgentContext& ctx, const SearchSpace& space, const Instruction& instruction,
                                 const TaskPlan& plan);

// searching
struct SearchStageOptions {
  int budget = 16;
  int diff_steps = 200;
  std::uint64_t seed = 0;
  int test_fold = 0;
  std::string space_file;
  std::vector<std::string> transforms;
};

search::SearchLog run_search_stage(AgentContext& ctx, const SearchSpace& space, Algorithm algorithm,
                                   const engine::Dataset& d, const SearchStageOptions& opts);
// Genotype of the best trial (see search::best_trial_index). EmptyLog.
Genotype extract_searched_model(const search::SearchLog& log);
Genotype extract_searched_model(AgentContext& ctx, const search::SearchLog& log);

Json search_digest(const search::SearchLog& log);
Json tune_digest(const hpo::TuneLog& log);
// stage is "searching" or "tuning"; the digest is checked before any LLM call.
std::string summarize_stage(AgentContext& ctx, const std::string& stage, const Json& digest);

// tuning
struct TuneStageOptions {
  int budget = 16;
  std::uint64_t seed = 0;
  int test_fold = 0;
  int final_repeats = 3;
};

struct TuningResult {
  engine::HyperParams best;
  hpo::TuneLog log;
  Json final_metrics;  // metric, val/test mean and std over repeats
};

TuningResult run_tuning_stage(AgentContext& ctx, const Genotype& g, const SearchSpace& space,
                              const engine::Dataset& d, const TuneStageOptions& opts);

// response
struct RunSummary {
  Json prediction_results = Json::object();  // metric -> {mean, std}
  Genotype architecture;
  engine::HyperParams hyperparameters;
  Json resource_usage = Json::object();  // wall_seconds_per_stage, tokens_per_stage, cost_usd_total
  std::string instruction_echo;
  std::string prose;

  Json to_json() const;
  static RunSummary from_json(const Json& j);
  std::string to_text() const;
};

// Per-stage tokens and costs from call records, plus wall seconds read from
// each stage namespace's "wall_ms".
Json resource_usage(const memory::RunBundle& bundle);

// KeyAbsent when an earlier stage left no record.
RunSummary compose_response(AgentContext& ctx, const Instruction& instruction);

// LLM-GNN baseline
struct DirectSuggestion {
  std::string description;
  Genotype genotype;
  engine::HyperParams hyperparams;
  std::vector<std::string> notes;
};

struct BaselineFlags {
  bool non_homophilous = false;
  bool multi_component = false;
};

// Addenda are also switched on by the plan: ranking plans get the
// multi-component sentence.
std::string render_baseline_prompt(const TaskPlan& plan, const BaselineFlags& flags);
DirectSuggestion suggest_direct_gnn(AgentContext& ctx, const TaskPlan& plan, const BaselineFlags& flags = {});
// Maps a free-text suggestion onto the node/graph backbone. UnmappableSuggestion.
DirectSuggestion map_suggestion(const std::string& text, const TaskPlan& plan, const catalog::Catalog& cat);

}  // namespace glagent::agents
