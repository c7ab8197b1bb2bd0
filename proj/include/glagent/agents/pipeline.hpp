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
#include <string>

#include "glagent/agents/agents.hpp"
#include "glagent/agents/config.hpp"
#include "glagent/agents/task_plan.hpp"
#include "glagent/llm/backend.hpp"
#include "glagent/memory/memory_store.hpp"

namespace glagent::agents {

// mock: rules from cfg.fixture_path (InvalidConfig when absent).
// http: settings from the environment.
std::shared_ptr<llm::Backend> make_backend(const RunConfig& cfg);

// Digest of everything that determines a run; equal inputs give equal ids.
std::string compute_run_id(const Instruction& instruction, const RunConfig& cfg);

struct PipelineOptions {
  // bundle.json, summary.json, summary.txt, search_log.jsonl, tune_log.json and
  // space.json land here. Nothing is written when empty.
  std::filesystem::path out_dir;
  // Overrides make_backend(cfg).
  std::shared_ptr<llm::Backend> backend;
};

struct PipelineResult {
  RunSummary summary;
  memory::RunBundle bundle;
};

// manager, data, configuration, searching, tuning, response. On failure the
// bundle is exported and StageFailure(stage, operation, cause) is thrown.
PipelineResult run_pipeline(const Instruction& instruction, const RunConfig& cfg, const PipelineOptions& opts = {});

}  // namespace glagent::agents
