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
#include <limits>
#include <span>
#include <vector>

#include "glagent/engine/dataset.hpp"
#include "glagent/engine/model.hpp"
#include "glagent/metric.hpp"

namespace glagent::engine {

enum class Split { Train, Val, Test };

// Graph collections: fold test_fold is the test set; from the rest, every
// fourth graph of each class (in index order) is held out for validation.
struct GraphFolds {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};
GraphFolds fold_split(const GraphCollection& c, int test_fold);

// Adam with L2 weight decay added to the gradient.
class Adam {
 public:
  Adam(double lr, double weight_decay, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  // grads is indexed like the store; empty entries are skipped.
  void step(ParamStore& store, const std::vector<Matrix>& grads);

 private:
  double lr_, wd_, b1_, b2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

// Labels and row sets for classification datasets (nodes or graphs).
struct LabelView {
  std::vector<int> labels;
  std::vector<std::size_t> train, val, test;
};
LabelView label_view(const Dataset& d, int test_fold);

double accuracy(const Matrix& logits, std::span<const int> labels, std::span<const std::size_t> rows);

// Mean over users with at least one item in `split` of |top-k ∩ items| / |items|.
// Candidates are the items outside the user's training set; ties go to the lower item id.
double recall_at_k(const Matrix& scores, const InteractionTable& t, int k, Split split);

Metric default_metric(const Dataset& d);

struct TrainOptions {
  int patience = 20;
  int test_fold = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;
};

struct TrainResult {
  double best_val = -std::numeric_limits<double>::infinity();
  double test_at_best = -std::numeric_limits<double>::infinity();
  // Cross-entropy on the validation rows at the best epoch; NaN for link models.
  double val_loss_at_best = std::numeric_limits<double>::quiet_NaN();
  int best_epoch = -1;
  std::vector<EpochRecord> history;
};

// Full-batch training with early stopping; the model ends at its best
// validation snapshot. Throws NonFiniteLoss on divergence.
TrainResult train(ModelState& m, const Dataset& d, const HyperParams& hp, std::uint64_t seed,
                  const TrainOptions& opts = {});

double evaluate(const ModelState& m, const Dataset& d, const Metric& metric, Split split = Split::Test,
                int test_fold = 0);

// Max relative error between tape gradients and central differences (step
// 1e-3) over num_sites sampled scalar parameters. The probed loss is the
// training loss without dropout or weight decay; link models use negatives
// drawn once from `seed`. Sites whose ±step moves any ReLU across its kink
// are resampled.
double gradient_check(ModelState& m, const Dataset& d, std::size_t num_sites, std::uint64_t seed,
                      int test_fold = 0);

// Losses above this are treated as divergence, like non-finite values.
inline constexpr double kDivergedLoss = 1e8;

}  // namespace glagent::engine
