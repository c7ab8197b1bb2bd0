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

#include "glagent/hpo/hpo.hpp"

#include <algorithm>
#include <cmath>

#include "glagent/engine/train.hpp"
#include "glagent/error.hpp"
#include "glagent/rng.hpp"

namespace glagent::hpo {

namespace {

void check_range(const char* name, const HpRange& r, bool positive) {
  const bool ok = std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi && (positive ? r.lo > 0 : r.lo >= 0);
  if (!ok)
    throw Error(ErrorCode::InvalidParameter,
                std::string(name) + " range [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) + "] is invalid");
}

double log_uniform(const HpRange& r, Rng& rng) {
  const double u = rng.uniform();
  if (r.lo == r.hi) return r.lo;
  const double v = std::exp(std::log(r.lo) + u * (std::log(r.hi) - std::log(r.lo)));
  return std::clamp(v, r.lo, r.hi);
}

double uniform(const HpRange& r, Rng& rng) {
  const double u = rng.uniform();
  if (r.lo == r.hi) return r.lo;
  return std::clamp(r.lo + u * (r.hi - r.lo), r.lo, r.hi);
}

Json metric_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

void HpSpace::validate() const {
  check_range("learning_rate", learning_rate, true);
  check_range("weight_decay", weight_decay, true);
  check_range("dropout", dropout, false);
  if (dropout.hi >= 1.0) throw Error(ErrorCode::InvalidParameter, "dropout must stay below 1");
  if (activation.empty()) throw Error(ErrorCode::InvalidParameter, "activation list is empty");
  for (const auto& a : activation)
    if (a != "relu" && a != "identity") throw Error(ErrorCode::InvalidParameter, "unknown activation '" + a + "'");
  if (epochs < 1 || hidden_dim < 1) throw Error(ErrorCode::InvalidParameter, "epochs and hidden_dim must be positive");
}

HpSpace HpSpace::from_table(const HpTable& t) {
  HpSpace s;
  s.learning_rate = t.learning_rate;
  s.weight_decay = t.weight_decay;
  s.dropout = t.dropout;
  s.activation = t.activation;
  s.epochs = t.epochs;
  s.hidden_dim = t.hidden_dim;
  s.validate();
  return s;
}

engine::HyperParams sample_hyperparams(const HpSpace& space, Rng& rng) {
  // Each draw consumes exactly one variate per field, so the stream layout
  // does not depend on which ranges are degenerate.
  engine::HyperParams hp;
  hp.learning_rate = log_uniform(space.learning_rate, rng);
  hp.weight_decay = log_uniform(space.weight_decay, rng);
  hp.dropout = uniform(space.dropout, rng);
  hp.activation = space.activation[static_cast<std::size_t>(rng.uniform_index(space.activation.size()))];
  hp.epochs = space.epochs;
  hp.hidden_dim = space.hidden_dim;
  return hp;
}

Json TuneLog::to_json() const {
  Json arr = Json::array();
  for (const auto& t : trials) {
    Json j{{"index", t.index},
           {"hyperparams", t.hyperparams.to_json()},
           {"val_metric", metric_json(t.val_metric)},
           {"test_metric", metric_json(t.test_metric)},
           {"wall_ms", t.wall_ms},
           {"failed", t.failed}};
    if (!t.error.empty()) j["error"] = t.error;
    arr.push_back(std::move(j));
  }
  return Json{{"trials", arr}, {"best_index", best_index}};
}

TuneLog TuneLog::from_json(const Json& j) {
  try {
    TuneLog log;
    const double ninf = -std::numeric_limits<double>::infinity();
    for (const auto& tj : j.at("trials")) {
      TuneTrial t;
      t.index = tj.at("index").get<int>();
      t.hyperparams = engine::HyperParams::from_json(tj.at("hyperparams"));
      t.val_metric = tj.at("val_metric").is_null() ? ninf : tj.at("val_metric").get<double>();
      t.test_metric = tj.at("test_metric").is_null() ? ninf : tj.at("test_metric").get<double>();
      t.wall_ms = tj.value("wall_ms", 0.0);
      t.failed = tj.value("failed", false);
      t.error = tj.value("error", std::string());
      log.trials.push_back(std::move(t));
    }
    log.best_index = j.at("best_index").get<int>();
    return log;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("tune log: ") + e.what());
  }
}

TuneEvalFn make_engine_tune_eval(const Genotype& g, const engine::Dataset& d, int test_fold) {
  return [g, &d, test_fold](const engine::HyperParams& hp, std::uint64_t seed) {
    engine::ModelState m = engine::build_model(g, engine::dims_for(d, static_cast<std::size_t>(hp.hidden_dim)), seed);
    engine::TrainOptions opts;
    opts.test_fold = test_fold;
    const engine::TrainResult r = engine::train(m, d, hp, seed, opts);
    return search::EvalResult{r.best_val, r.test_at_best, r.val_loss_at_best};
  };
}

TuneLog tune(const Genotype& g, const SearchSpace& space, int budget, const TuneEvalFn& eval, std::uint64_t seed,
             const Clock* clock) {
  if (budget < 1) throw Error(ErrorCode::BudgetNonPositive, "tuning budget must be at least 1");
  const HpSpace hs = HpSpace::from_table(space.hp_table);
  Rng rng(mix_seed(seed, 0x68706f));
  const std::uint64_t train_seed = search::trial_seed(seed, g);
  TuneLog log;
  for (int i = 0; i < budget; ++i) {
    TuneTrial t;
    t.index = i;
    t.hyperparams = sample_hyperparams(hs, rng);
    const double start = clock ? clock->now_ms() : 0.0;
    try {
      const search::EvalResult r = eval(t.hyperparams, train_seed);
      t.val_metric = r.val_metric;
      t.test_metric = r.test_metric;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFiniteLoss) throw;
      t.failed = true;
      t.error = e.what();
    }
    t.wall_ms = clock ? clock->now_ms() - start : 0.0;
    log.trials.push_back(std::move(t));
  }
  log.best_index = best_index(log);
  return log;
}

int best_index(const TuneLog& log) {
  if (log.trials.empty()) throw Error(ErrorCode::EmptyLog, "tune log has no trials");
  std::size_t best = 0;
  for (std::size_t i = 1; i < log.trials.size(); ++i)
    if (log.trials[i].val_metric > log.trials[best].val_metric) best = i;
  return static_cast<int>(best);
}

engine::HyperParams best_trial(const TuneLog& log) {
  return log.trials[static_cast<std::size_t>(best_index(log))].hyperparams;
}

}  // namespace glagent::hpo
