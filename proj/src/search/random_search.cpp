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

#include <cmath>
#include <unordered_map>

#include "glagent/engine/train.hpp"
#include "glagent/error.hpp"
#include "glagent/rng.hpp"
#include "glagent/search/search.hpp"

namespace glagent::search {

engine::HyperParams search_hyperparams(const SearchSpace& space) {
  const HpTable& t = space.hp_table;
  engine::HyperParams hp;
  hp.learning_rate = t.learning_rate.midpoint();
  hp.weight_decay = t.weight_decay.midpoint();
  hp.dropout = t.dropout.midpoint();
  hp.activation = t.activation.empty() ? "relu" : t.activation.front();
  hp.epochs = t.epochs;
  hp.hidden_dim = t.hidden_dim;
  return hp;
}

EvalFn make_engine_eval(const engine::Dataset& d, const engine::HyperParams& hp, int test_fold) {
  return [&d, hp, test_fold](const Genotype& g, std::uint64_t seed) {
    engine::ModelState m = engine::build_model(g, engine::dims_for(d, static_cast<std::size_t>(hp.hidden_dim)), seed);
    engine::TrainOptions opts;
    opts.test_fold = test_fold;
    const engine::TrainResult r = engine::train(m, d, hp, seed, opts);
    return EvalResult{r.best_val, r.test_at_best, r.val_loss_at_best};
  };
}

TrialRecord run_trial(int index, const Genotype& g, const engine::HyperParams& hp, std::uint64_t seed,
                      const EvalFn& eval, const Clock* clock) {
  TrialRecord t;
  t.trial_index = index;
  t.genotype = g;
  t.hyperparams = hp;
  t.seed = seed;
  const double start = clock ? clock->now_ms() : 0.0;
  try {
    const EvalResult r = eval(g, seed);
    t.val_metric = r.val_metric;
    t.test_metric = r.test_metric;
    t.val_loss = r.val_loss;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonFiniteLoss) throw;
    t.failed = true;
    t.error = e.what();
  }
  t.wall_ms = clock ? clock->now_ms() - start : 0.0;
  return t;
}

SearchLog random_search(const SearchSpace& space, int budget, const EvalFn& eval, std::uint64_t seed,
                        const Clock* clock) {
  if (budget < 1) throw Error(ErrorCode::BudgetNonPositive, "search budget must be at least 1");
  const std::uint64_t count = count_genotypes(space);
  const engine::HyperParams hp = search_hyperparams(space);
  Rng rng(mix_seed(seed, 0x72616e64));
  SearchLog log;
  log.algorithm = "random";
  log.space_digest = space.digest();
  const auto b = static_cast<std::uint64_t>(budget);
  // Partial Fisher-Yates over [0, count) held sparsely: draws are distinct
  // while the budget lasts, then sampling continues with replacement.
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto at = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  for (std::uint64_t k = 0; k < b; ++k) {
    std::uint64_t index = 0;
    if (k < count) {
      const std::uint64_t j = k + rng.uniform_index(count - k);
      index = at(j);
      swapped[j] = at(k);
      swapped[k] = index;
    } else {
      index = rng.uniform_index(count);
    }
    const Genotype g = genotype_at(space, index);
    log.trials.push_back(run_trial(static_cast<int>(k), g, hp, trial_seed(seed, g), eval, clock));
  }
  return log;
}

SearchLog enumerate_and_evaluate(const SearchSpace& space, std::uint64_t limit, const EvalFn& eval,
                                 std::uint64_t seed, const Clock* clock) {
  const auto all = enumerate_genotypes(space, limit);
  const engine::HyperParams hp = search_hyperparams(space);
  SearchLog log;
  log.algorithm = "enumeration";
  log.space_digest = space.digest();
  for (std::size_t i = 0; i < all.size(); ++i)
    log.trials.push_back(run_trial(static_cast<int>(i), all[i], hp, trial_seed(seed, all[i]), eval, clock));
  return log;
}

}  // namespace glagent::search
