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
#include "glagent/search/search.hpp"

namespace glagent {
class Rng;
}

namespace glagent::hpo {

// learning_rate and weight_decay sample log-uniformly, dropout uniformly,
// activation uniformly over its list. epochs and hidden_dim are fixed.
struct HpSpace {
  HpRange learning_rate;
  HpRange weight_decay;
  HpRange dropout;
  std::vector<std::string> activation;
  int epochs = 100;
  int hidden_dim = 16;

  // InvalidParameter when a range is empty, non-positive where log-uniform,
  // or dropout falls outside [0, 1).
  void validate() const;
  static HpSpace from_table(const HpTable& table);
};

engine::HyperParams sample_hyperparams(const HpSpace& space, Rng& rng);

struct TuneTrial {
  int index = 0;
  engine::HyperParams hyperparams;
  double val_metric = -std::numeric_limits<double>::infinity();
  double test_metric = -std::numeric_limits<double>::infinity();
  double wall_ms = 0.0;
  bool failed = false;
  std::string error;
};

struct TuneLog {
  std::vector<TuneTrial> trials;
  int best_index = -1;

  Json to_json() const;
  static TuneLog from_json(const Json& j);
};

using TuneEvalFn = std::function<search::EvalResult(const engine::HyperParams&, std::uint64_t seed)>;

// Trains `g` on `d` with the given hyperparameters.
TuneEvalFn make_engine_tune_eval(const Genotype& g, const engine::Dataset& d, int test_fold = 0);

// Evaluates `budget` sampled configurations. Every trial trains from the same
// seed (derived from the genotype), so trials differ only in hyperparameters.
// BudgetNonPositive when budget < 1.
TuneLog tune(const Genotype& g, const SearchSpace& space, int budget, const TuneEvalFn& eval,
             std::uint64_t seed, const Clock* clock = nullptr);

// argmax of val_metric, earliest on ties. EmptyLog on an empty log.
int best_index(const TuneLog& log);
engine::HyperParams best_trial(const TuneLog& log);

}  // namespace glagent::hpo
