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
#include <optional>
#include <string>

#include "glagent/engine/dataset.hpp"
#include "glagent/json.hpp"
#include "glagent/llm/client.hpp"

namespace glagent::agents {

// Where the dataset comes from: a file path, or a generator with parameters.
struct DatasetSource {
  std::string kind;       // node | graph | link
  std::string path;       // node dir, graph jsonl or ratings tsv
  std::string generator;  // sbm | motif | interactions
  Json params = Json::object();

  Json to_json() const;
  static DatasetSource from_json(const Json& j);
};

struct RunConfig {
  DatasetSource dataset;
  std::string backend = "mock";  // mock | http
  std::string fixture_path;
  std::uint64_t seed = 0;
  int search_budget = 16;
  int tune_budget = 16;
  int epochs = 100;
  int hidden_dim = 16;
  int num_blocks = 2;
  int diff_steps = 200;
  int final_repeats = 3;
  int test_fold = 0;
  // logical | wall. Empty picks logical for mock and wall for http.
  std::string timing;
  llm::RateCard rate_card;
  // Re-ask once with a "structured block only" suffix when parsing fails.
  bool reprompt = false;
  // Relative paths resolve against this directory. Not serialized.
  std::filesystem::path base_dir;

  Json to_json() const;
  // InvalidConfig on unknown keys or bad values.
  static RunConfig from_json(const Json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  std::filesystem::path resolve(const std::string& p) const;
  std::string clock_kind() const;
};

// Loads or generates the configured dataset.
engine::Dataset load_config_dataset(const RunConfig& cfg);

}  // namespace glagent::agents
