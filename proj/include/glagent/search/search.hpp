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
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "glagent/clock.hpp"
#include "glagent/engine/dataset.hpp"
#include "glagent/engine/model.hpp"
#include "glagent/genotype.hpp"
#include "glagent/json.hpp"

namespace glagent::search {

struct TrialRecord {
  int trial_index = 0;
  Genotype genotype;
  engine::HyperParams hyperparams;
  std::uint64_t seed = 0;
  double val_metric = -std::numeric_limits<double>::infinity();
  double test_metric = -std::numeric_limits<double>::infinity();
  // Secondary ranking key: lower validation loss wins among equal metrics.
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
  bool failed = false;
  std::string error;

  Json to_json() const;
  static TrialRecord from_json(const Json& j);
};

struct SearchLog {
  std::string algorithm;  // "random" | "differentiable" | "enumeration"
  std::string space_digest;
  std::vector<TrialRecord> trials;
  Json extras = Json::object();

  // One trial per line. extras are carried by to_json only.
  std::string to_jsonl() const;
  static SearchLog from_jsonl(const std::string& text);
  Json to_json() const;
  static SearchLog from_json(const Json& j);
};

// True when a ranks strictly above b: higher validation metric, then lower
// validation loss when both carry one. Otherwise the earlier trial stays ahead.
bool ranks_above(const TrialRecord& a, const TrialRecord& b);

// Index of the best trial under ranks_above, earliest first. EmptyLog on an empty log.
std::size_t best_trial_index(const SearchLog& log);

// Closed-form count; saturates at UINT64_MAX.
std::uint64_t count_genotypes(const SearchSpace& space);
// Mixed-radix decode of the lexicographic enumeration.
Genotype genotype_at(const SearchSpace& space, std::uint64_t index);
// SpaceTooLarge when the count exceeds limit.
std::vector<Genotype> enumerate_genotypes(const SearchSpace& space, std::uint64_t limit);

// Trial seed: the base seed mixed with a hash of the genotype text, so a
// genotype evaluates the same under every search method.
std::uint64_t trial_seed(std::uint64_t base_seed, const Genotype& g);

struct EvalResult {
  double val_metric = 0.0;
  double test_metric = 0.0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
};

// Evaluates one genotype; NonFiniteLoss marks the trial failed.
using EvalFn = std::function<EvalResult(const Genotype&, std::uint64_t seed)>;

// Builds, trains and scores a genotype on a dataset with fixed hyperparameters.
EvalFn make_engine_eval(const engine::Dataset& d, const engine::HyperParams& hp, int test_fold = 0);

// Hyperparameters used during search: midpoints of the space's ranges,
// first activation, the table's epochs and hidden width.
engine::HyperParams search_hyperparams(const SearchSpace& space);

TrialRecord run_trial(int index, const Genotype& g, const engine::HyperParams& hp, std::uint64_t seed,
                      const EvalFn& eval, const Clock* clock);

SearchLog random_search(const SearchSpace& space, int budget, const EvalFn& eval, std::uint64_t seed,
                        const Clock* clock = nullptr);

// Evaluates every genotype in enumeration order.
SearchLog enumerate_and_evaluate(const SearchSpace& space, std::uint64_t limit, const EvalFn& eval,
                                 std::uint64_t seed, const Clock* clock = nullptr);

struct DiffConfig {
  int steps = 200;
  double arch_lr = 3e-3;
  engine::HyperParams hp;
  int test_fold = 0;
};

// Alternating first-order relaxation; returns a log whose single trial is
// the retrained discretized genotype. extras carry the final architecture
// weights and the largest observed |sum(softmax) - 1|.
SearchLog differentiable_search(const SearchSpace& space, const engine::Dataset& d, const DiffConfig& cfg,
                                std::uint64_t seed, const Clock* clock = nullptr);

// NotRelaxable when some decision site cannot be mixed continuously.
void require_relaxable(const SearchSpace& space);
bool is_relaxable(const SearchSpace& space);

}  // namespace glagent::search
