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

#include <algorithm>
#include <cmath>

#include "glagent/engine/train.hpp"
#include "glagent/error.hpp"
#include "glagent/rng.hpp"
#include "glagent/search/search.hpp"

namespace glagent::search {

using engine::Binder;
using engine::Matrix;
using engine::ParamStore;
using engine::Tape;
using engine::Var;

bool is_relaxable(const SearchSpace& space) { return space.instance != Instance::LinkProfcf; }

void require_relaxable(const SearchSpace& space) {
  if (!is_relaxable(space))
    throw Error(ErrorCode::NotRelaxable,
                "layer-number and component-number sites are discrete sizes and cannot be mixed");
  for (const auto& op : space.ops(modules::kAggregation))
    if (!engine::engine_implements(op))
      throw Error(ErrorCode::NotRelaxable, "aggregation " + op + " has no engine implementation");
}

namespace {

std::string bp(int i) { return "b" + std::to_string(i + 1); }

struct Supernet {
  const SearchSpace& space;
  bool gated = false;
  ParamStore weights;
  ParamStore arch;

  explicit Supernet(const SearchSpace& s) : space(s) {
    const auto& sel = s.ops(modules::kSelection);
    gated = std::find(sel.begin(), sel.end(), "ZERO") != sel.end();
  }

  const std::vector<std::string>& aggs() const { return space.ops(modules::kAggregation); }
  const std::vector<std::string>& fuses() const { return space.ops(modules::kFusion); }

  void declare(const engine::Dims& dims, std::uint64_t seed) {
    using I = ParamStore::Init;
    const std::size_t h = dims.hidden;
    weights.add("pre.W", dims.in_dim, h, I::Uniform, seed);
    weights.add("pre.b", 1, h, I::Zero, seed);
    for (int i = 0; i < space.num_blocks; ++i) {
      for (const auto& op : aggs()) engine::declare_aggregation(weights, bp(i), op, h, h, seed);
      arch.add("alpha." + bp(i), 1, aggs().size(), I::Zero, seed);
      if (i > 0) {
        if (gated) arch.add("gate." + bp(i), 1, static_cast<std::size_t>(i) + 1, I::Zero, seed);
        arch.add("fuse." + bp(i), 1, fuses().size(), I::Zero, seed);
      }
    }
    if (space.instance == Instance::GraphLrgnn)
      arch.add("readout", 1, space.ops(modules::kReadout).size(), I::Zero, seed);
    weights.add("cls.W", h, dims.num_classes, I::Uniform, seed);
    weights.add("cls.b", 1, dims.num_classes, I::Zero, seed);
  }

  // Softmax-weighted mixture of the given candidate outputs.
  static Var mix(Tape& t, Var weights_row, const std::vector<Var>& outs) {
    Var acc = engine::scale_by(t, outs[0], engine::element(t, weights_row, 0, 0));
    for (std::size_t k = 1; k < outs.size(); ++k)
      acc = engine::add(t, acc, engine::scale_by(t, outs[k], engine::element(t, weights_row, 0, k)));
    return acc;
  }

  Var forward(Binder& w, Binder& a, const engine::GraphContext& ctx, const engine::ForwardOptions& o,
              Rng& rng, std::vector<Var>& softmaxes) const {
    Tape& t = w.tape();
    auto drop = [&](Var x) { return o.training && o.dropout > 0.0 ? engine::dropout(t, x, o.dropout, rng) : x; };
    Var x = t.constant(ctx.features);
    std::vector<Var> reps{engine::activate(t, engine::linear(w, "pre", drop(x)), o.activation)};
    Var total{};
    for (int i = 0; i < space.num_blocks; ++i) {
      Var fused = reps[0];
      if (i > 0) {
        Var sum_in{}, weight_total{};
        for (int j = 0; j <= i; ++j) {
          Var term = reps[static_cast<std::size_t>(j)];
          Var gw{};
          if (gated) {
            gw = engine::element(t, engine::sigmoid(t, a("gate." + bp(i))), 0, static_cast<std::size_t>(j));
            term = engine::scale_by(t, term, gw);
          } else {
            gw = t.constant(Matrix(1, 1, 1.0));
          }
          sum_in = j == 0 ? term : engine::add(t, sum_in, term);
          weight_total = j == 0 ? gw : engine::add(t, weight_total, gw);
        }
        Var mean_in = engine::scale_by(t, sum_in, engine::reciprocal(t, weight_total));
        Var beta = engine::softmax_row(t, a("fuse." + bp(i)));
        softmaxes.push_back(beta);
        std::vector<Var> outs;
        for (const auto& f : fuses()) outs.push_back(f == "mean" ? mean_in : sum_in);
        fused = mix(t, beta, outs);
      }
      Var in = drop(fused);
      std::vector<Var> outs;
      for (const auto& op : aggs())
        outs.push_back(engine::activate(t, engine::aggregate(w, bp(i), op, in, ctx), o.activation));
      Var alpha = engine::softmax_row(t, a("alpha." + bp(i)));
      softmaxes.push_back(alpha);
      Var out = mix(t, alpha, outs);
      reps.push_back(out);
      total = i == 0 ? out : engine::add(t, total, out);
    }
    if (space.instance == Instance::GraphLrgnn) {
      std::vector<Var> outs;
      for (const auto& r : space.ops(modules::kReadout)) outs.push_back(engine::readout(t, total, r, ctx));
      Var rho = engine::softmax_row(t, a("readout"));
      softmaxes.push_back(rho);
      total = mix(t, rho, outs);
    }
    return engine::linear(w, "cls", drop(total));
  }

  static std::size_t argmax(const Matrix& row) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < row.cols; ++k)
      if (row.data[k] > row.data[best]) best = k;
    return best;
  }

  Genotype discretize() const {
    Genotype g;
    g.instance = space.instance;
    for (int i = 0; i < space.num_blocks; ++i) {
      BlockGene b;
      b.agg = aggs()[argmax(arch.value("alpha." + bp(i)))];
      if (i == 0) {
        b.inputs = {0};
      } else if (!gated) {
        for (int j = 0; j <= i; ++j) b.inputs.push_back(j);
      } else {
        const Matrix& gate = arch.value("gate." + bp(i));
        // sigmoid(x) > 0.5 exactly when x > 0.
        for (int j = 0; j <= i; ++j)
          if (gate.data[static_cast<std::size_t>(j)] > 0.0) b.inputs.push_back(j);
        if (b.inputs.empty()) b.inputs.push_back(static_cast<int>(argmax(gate)));
      }
      b.fuse = b.inputs.size() == 1 ? "sum" : fuses()[argmax(arch.value("fuse." + bp(i)))];
      g.blocks.push_back(std::move(b));
    }
    if (space.instance == Instance::GraphLrgnn)
      g.readout = space.ops(modules::kReadout)[argmax(arch.value("readout"))];
    return g;
  }
};

}  // namespace

SearchLog differentiable_search(const SearchSpace& space, const engine::Dataset& d, const DiffConfig& cfg,
                                std::uint64_t seed, const Clock* clock) {
  require_relaxable(space);
  if (cfg.steps < 1) throw Error(ErrorCode::BudgetNonPositive, "differentiable search needs at least one step");
  const bool node = std::holds_alternative<engine::NodeGraph>(d);
  const bool graph = std::holds_alternative<engine::GraphCollection>(d);
  if ((space.instance == Instance::NodeF2gnn && !node) || (space.instance == Instance::GraphLrgnn && !graph))
    throw Error(ErrorCode::DatasetMismatch, std::string("space ") + to_string(space.instance) +
                                                " does not match a " + engine::dataset_kind(d) + " dataset");
  cfg.hp.validate();

  Supernet net(space);
  const engine::Dims dims = engine::dims_for(d, static_cast<std::size_t>(cfg.hp.hidden_dim));
  net.declare(dims, mix_seed(seed, 0x7375706e));
  const engine::GraphContext ctx = engine::make_context(d);
  const engine::LabelView lv = engine::label_view(d, cfg.test_fold);
  engine::Adam weight_opt(cfg.hp.learning_rate, cfg.hp.weight_decay);
  engine::Adam arch_opt(cfg.arch_lr, 0.0);
  Rng rng(mix_seed(seed, 0x64617274));
  const engine::ForwardOptions train_mode{true, cfg.hp.dropout, cfg.hp.activation};
  const engine::ForwardOptions eval_mode{false, 0.0, cfg.hp.activation};

  const double start = clock ? clock->now_ms() : 0.0;
  double max_dev = 0.0;
  for (int step = 0; step < cfg.steps; ++step) {
    const bool weight_step = step % 2 == 0;
    Tape t;
    Binder w(t, net.weights);
    Binder a(t, net.arch);
    std::vector<Var> softmaxes;
    Var logits = net.forward(w, a, ctx, weight_step ? train_mode : eval_mode, rng, softmaxes);
    for (Var s : softmaxes) {
      double sum = 0.0;
      for (double v : t.value(s).data) sum += v;
      max_dev = std::max(max_dev, std::fabs(sum - 1.0));
    }
    Var loss = engine::cross_entropy(t, logits, lv.labels, weight_step ? lv.train : lv.val);
    const double lv_value = t.value(loss).data[0];
    if (!std::isfinite(lv_value) || std::fabs(lv_value) > engine::kDivergedLoss)
      throw Error(ErrorCode::NonFiniteLoss, "supernet diverged at step " + std::to_string(step));
    t.backward(loss);
    if (weight_step) {
      weight_opt.step(net.weights, w.gradients());
    } else {
      arch_opt.step(net.arch, a.gradients());
    }
  }

  const Genotype g = net.discretize();
  validate_genotype(g, space);
  SearchLog log;
  log.algorithm = "differentiable";
  log.space_digest = space.digest();
  const EvalFn eval = make_engine_eval(d, cfg.hp, cfg.test_fold);
  log.trials.push_back(run_trial(0, g, cfg.hp, trial_seed(seed, g), eval, clock));
  Json weights = Json::object();
  for (std::size_t i = 0; i < net.arch.size(); ++i) weights[net.arch.name(i)] = net.arch.value(i).data;
  log.extras = Json{{"steps", cfg.steps},
                    {"arch_lr", cfg.arch_lr},
                    {"max_softmax_deviation", max_dev},
                    {"arch_weights", weights},
                    {"discretized", g.to_string()},
                    {"search_ms", clock ? clock->now_ms() - start : 0.0}};
  return log;
}

}  // namespace glagent::search
