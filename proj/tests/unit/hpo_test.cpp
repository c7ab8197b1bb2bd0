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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "glagent/error.hpp"
#include "glagent/hpo/hpo.hpp"
#include "glagent/rng.hpp"
#include "test_util.hpp"

namespace glagent::hpo {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoFailure;
}

Genotype some_node_genotype() {
  Genotype g;
  g.blocks = {{"GCN", {0}, "sum"}, {"GCN", {1}, "sum"}};
  return g;
}

TEST(Sampling, StaysInsideRangesAndCoversThem) {
  HpSpace s = HpSpace::from_table(HpTable::defaults_for(Instance::NodeF2gnn));
  s.activation = {"relu", "identity"};
  Rng rng(1);
  std::set<std::string> acts;
  double lr_min = 1, lr_max = 0;
  int below_geo_mean = 0;
  const double geo = std::sqrt(s.learning_rate.lo * s.learning_rate.hi);
  for (int i = 0; i < 2000; ++i) {
    const auto hp = sample_hyperparams(s, rng);
    EXPECT_GE(hp.learning_rate, s.learning_rate.lo);
    EXPECT_LE(hp.learning_rate, s.learning_rate.hi);
    EXPECT_GE(hp.weight_decay, s.weight_decay.lo);
    EXPECT_LE(hp.weight_decay, s.weight_decay.hi);
    EXPECT_GE(hp.dropout, s.dropout.lo);
    EXPECT_LE(hp.dropout, s.dropout.hi);
    EXPECT_EQ(hp.epochs, s.epochs);
    EXPECT_EQ(hp.hidden_dim, s.hidden_dim);
    acts.insert(hp.activation);
    lr_min = std::min(lr_min, hp.learning_rate);
    lr_max = std::max(lr_max, hp.learning_rate);
    below_geo_mean += hp.learning_rate < geo ? 1 : 0;
  }
  EXPECT_EQ(acts.size(), 2u);
  // Log-uniform: half the mass lies below the geometric mean.
  EXPECT_NEAR(below_geo_mean / 2000.0, 0.5, 0.05);
  EXPECT_LT(lr_min, s.learning_rate.lo * 1.1);
  EXPECT_GT(lr_max, s.learning_rate.hi * 0.9);
}

TEST(Sampling, DegenerateRangesReturnTheBound) {
  HpSpace s;
  s.learning_rate = {0.01, 0.01};
  s.weight_decay = {1e-4, 1e-4};
  s.dropout = {0.0, 0.0};
  s.activation = {"relu"};
  s.validate();
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto hp = sample_hyperparams(s, rng);
    EXPECT_EQ(hp.learning_rate, 0.01);
    EXPECT_EQ(hp.weight_decay, 1e-4);
    EXPECT_EQ(hp.dropout, 0.0);
  }
}

TEST(Sampling, InvalidSpaces) {
  HpSpace s = HpSpace::from_table(HpTable::defaults_for(Instance::NodeF2gnn));
  HpSpace bad = s;
  bad.learning_rate = {0.1, 0.01};
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidParameter);
  bad = s;
  bad.weight_decay = {0.0, 1e-3};
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidParameter);
  bad = s;
  bad.dropout = {0.2, 1.0};
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidParameter);
  bad = s;
  bad.activation = {"tanh"};
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidParameter);
}

TEST(Tune, BudgetSeedsAndArgmax) {
  const SearchSpace space = SearchSpace::default_for(Instance::NodeF2gnn);
  const Genotype g = some_node_genotype();
  std::set<std::uint64_t> seeds;
  auto eval = [&](const engine::HyperParams& hp, std::uint64_t seed) {
    seeds.insert(seed);
    return search::EvalResult{-std::fabs(std::log10(hp.learning_rate) + 2.0), 0.0};
  };
  const TuneLog log = tune(g, space, 12, eval, 5);
  ASSERT_EQ(log.trials.size(), 12u);
  EXPECT_EQ(seeds.size(), 1u);
  EXPECT_EQ(*seeds.begin(), search::trial_seed(5, g));
  int expect = 0;
  for (int i = 1; i < 12; ++i)
    if (log.trials[i].val_metric > log.trials[expect].val_metric) expect = i;
  EXPECT_EQ(log.best_index, expect);
  EXPECT_EQ(best_trial(log), log.trials[expect].hyperparams);

  const TuneLog again = tune(g, space, 12, eval, 5);
  EXPECT_EQ(again.to_json(), log.to_json());
  EXPECT_EQ(TuneLog::from_json(log.to_json()).to_json(), log.to_json());
  EXPECT_EQ(code_of([&] { tune(g, space, 0, eval, 5); }), ErrorCode::BudgetNonPositive);
  EXPECT_EQ(code_of([] { best_index(TuneLog{}); }), ErrorCode::EmptyLog);
}

TEST(Tune, BudgetOneAndTies) {
  const SearchSpace space = SearchSpace::default_for(Instance::NodeF2gnn);
  auto flat = [](const engine::HyperParams&, std::uint64_t) { return search::EvalResult{0.5, 0.5}; };
  const TuneLog one = tune(some_node_genotype(), space, 1, flat, 2);
  EXPECT_EQ(one.trials.size(), 1u);
  EXPECT_EQ(one.best_index, 0);
  EXPECT_EQ(tune(some_node_genotype(), space, 6, flat, 2).best_index, 0);
}

TEST(Tune, DivergedTrialsAreSkipped) {
  const SearchSpace space = SearchSpace::default_for(Instance::NodeF2gnn);
  int calls = 0;
  auto eval = [&](const engine::HyperParams&, std::uint64_t) -> search::EvalResult {
    if (calls++ == 0) throw Error(ErrorCode::NonFiniteLoss, "diverged");
    return {0.1 * calls, 0.0};
  };
  const TuneLog log = tune(some_node_genotype(), space, 3, eval, 2);
  EXPECT_TRUE(log.trials[0].failed);
  EXPECT_EQ(log.best_index, 2);
  EXPECT_TRUE(TuneLog::from_json(log.to_json()).trials[0].failed);
}

TEST(Tune, EngineEvalImprovesOverDefaults) {
  SearchSpace space = SearchSpace::default_for(Instance::NodeF2gnn);
  space.hp_table.epochs = 60;
  space.hp_table.hidden_dim = 8;
  const engine::Dataset d = testing::desk_sbm(3.0);
  const TuneLog log = tune(some_node_genotype(), space, 4, make_engine_tune_eval(some_node_genotype(), d), 3);
  for (const auto& t : log.trials) {
    EXPECT_FALSE(t.failed);
    EXPECT_GE(t.val_metric, 0.0);
    EXPECT_LE(t.val_metric, 1.0);
  }
  EXPECT_GE(log.trials[static_cast<std::size_t>(log.best_index)].val_metric, 0.8);
}

}  // namespace
}  // namespace glagent::hpo
