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

#include "glagent/engine/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glagent/error.hpp"
#include "glagent/rng.hpp"

namespace glagent::engine {

GraphFolds fold_split(const GraphCollection& c, int test_fold) {
  if (test_fold < 0 || test_fold >= c.num_folds)
    throw Error(ErrorCode::InvalidParameter, "test fold " + std::to_string(test_fold) + " of " +
                                                 std::to_string(c.num_folds));
  GraphFolds f;
  std::vector<int> seen(static_cast<std::size_t>(std::max(c.num_classes, 1)), 0);
  for (std::size_t g = 0; g < c.graphs.size(); ++g) {
    if (c.folds[g] == test_fold) {
      f.test.push_back(g);
    } else if (seen[static_cast<std::size_t>(c.labels[g])]++ % 4 == 3) {
      f.val.push_back(g);
    } else {
      f.train.push_back(g);
    }
  }
  if (f.val.empty() && f.train.size() > 1) {
    f.val.push_back(f.train.back());
    f.train.pop_back();
  }
  if (f.train.empty() || f.val.empty() || f.test.empty())
    throw Error(ErrorCode::InvalidParameter, "graph collection too small for a train/val/test split");
  return f;
}

Adam::Adam(double lr, double weight_decay, double beta1, double beta2, double eps)
    : lr_(lr), wd_(weight_decay), b1_(beta1), b2_(beta2), eps_(eps) {}

void Adam::step(ParamStore& store, const std::vector<Matrix>& grads) {
  if (m_.size() != store.size()) {
    m_.assign(store.size(), Matrix());
    v_.assign(store.size(), Matrix());
    for (std::size_t i = 0; i < store.size(); ++i) {
      m_[i] = Matrix(store.value(i).rows, store.value(i).cols);
      v_[i] = m_[i];
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (grads[i].size() == 0) continue;
    Matrix& w = store.value(i);
    for (std::size_t k = 0; k < w.data.size(); ++k) {
      const double g = grads[i].data[k] + wd_ * w.data[k];
      double& m = m_[i].data[k];
      double& v = v_[i].data[k];
      m = b1_ * m + (1.0 - b1_) * g;
      v = b2_ * v + (1.0 - b2_) * g * g;
      w.data[k] -= lr_ * (m / c1) / (std::sqrt(v / c2) + eps_);
    }
  }
}

double accuracy(const Matrix& logits, std::span<const int> labels, std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t r : rows) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.cols; ++c)
      if (logits(r, c) > logits(r, best)) best = c;
    if (static_cast<int>(best) == labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

double recall_at_k(const Matrix& scores, const InteractionTable& t, int k, Split split) {
  if (k < 1) throw Error(ErrorCode::InvalidParameter, "recall cutoff must be positive");
  if (scores.rows != t.num_users || scores.cols != t.num_items)
    throw Error(ErrorCode::DimensionMismatch, "score matrix does not match the table");
  const auto& target = split == Split::Test ? t.test_items : split == Split::Val ? t.val_items : t.train_items;
  double total = 0.0;
  std::size_t users = 0;
  std::vector<std::size_t> cand;
  for (std::size_t u = 0; u < t.num_users; ++u) {
    if (target[u].empty()) continue;
    cand.clear();
    const auto& seen = t.train_items[u];
    for (std::size_t i = 0; i < t.num_items; ++i)
      if (split == Split::Train || !std::binary_search(seen.begin(), seen.end(), i)) cand.push_back(i);
    const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(top), cand.end(),
                      [&](std::size_t a, std::size_t b) {
                        return scores(u, a) != scores(u, b) ? scores(u, a) > scores(u, b) : a < b;
                      });
    std::size_t hits = 0;
    for (std::size_t r = 0; r < top; ++r)
      if (std::binary_search(target[u].begin(), target[u].end(), cand[r])) ++hits;
    total += static_cast<double>(hits) / static_cast<double>(target[u].size());
    ++users;
  }
  return users ? total / static_cast<double>(users) : 0.0;
}

Metric default_metric(const Dataset& d) {
  return std::holds_alternative<InteractionTable>(d) ? Metric::recall_at(20) : Metric::accuracy();
}

namespace {

void check_kind(const ModelState& m, const Dataset& d) {
  const bool ok = (m.genotype.instance == Instance::NodeF2gnn && std::holds_alternative<NodeGraph>(d)) ||
                  (m.genotype.instance == Instance::GraphLrgnn && std::holds_alternative<GraphCollection>(d)) ||
                  (m.genotype.instance == Instance::LinkProfcf && std::holds_alternative<InteractionTable>(d));
  if (!ok)
    throw Error(ErrorCode::DatasetMismatch, std::string("model ") + to_string(m.genotype.instance) +
                                                " cannot run on a " + dataset_kind(d) + " dataset");
}

void check_metric(const Metric& metric, const Dataset& d) {
  const bool link = std::holds_alternative<InteractionTable>(d);
  if (metric.kind == Metric::Kind::RSquared)
    throw Error(ErrorCode::MetricMismatch, "r_squared needs a regression model, which the engine lacks");
  if (link != (metric.kind == Metric::Kind::RecallAtK))
    throw Error(ErrorCode::MetricMismatch,
                metric.to_string() + " does not apply to a " + dataset_kind(d) + " dataset");
}

}  // namespace

LabelView label_view(const Dataset& d, int test_fold) {
  LabelView v;
  if (const auto* g = std::get_if<NodeGraph>(&d)) {
    v.labels = g->labels;
    v.train = g->splits.train;
    v.val = g->splits.val;
    v.test = g->splits.test;
  } else if (const auto* c = std::get_if<GraphCollection>(&d)) {
    v.labels = c->labels;
    GraphFolds f = fold_split(*c, test_fold);
    v.train = std::move(f.train);
    v.val = std::move(f.val);
    v.test = std::move(f.test);
  }
  return v;
}

namespace {

struct BprBatch {
  std::vector<std::size_t> users, pos, neg;
};

BprBatch sample_bpr(const InteractionTable& t, Rng& rng) {
  BprBatch b;
  for (std::size_t u = 0; u < t.num_users; ++u) {
    const auto& seen = t.train_items[u];
    if (seen.size() >= t.num_items) continue;
    for (std::size_t i : seen) {
      std::size_t j = 0;
      do {
        j = static_cast<std::size_t>(rng.uniform_index(t.num_items));
      } while (std::binary_search(seen.begin(), seen.end(), j));
      b.users.push_back(u);
      b.pos.push_back(i);
      b.neg.push_back(j);
    }
  }
  if (b.users.empty()) throw Error(ErrorCode::InvalidParameter, "no training interactions to rank");
  return b;
}

Var loss_of(Binder& p, const ModelState& m, Var out, const LabelView& lv, const BprBatch* bpr) {
  Tape& t = p.tape();
  if (m.genotype.instance != Instance::LinkProfcf) return cross_entropy(t, out, lv.labels, lv.train);
  Var sp = link_scores(p, m, out, bpr->users, bpr->pos);
  Var sn = link_scores(p, m, out, bpr->users, bpr->neg);
  return bpr_loss(t, sp, sn);
}

struct Scores {
  double val = 0.0;
  double test = 0.0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
};

double mean_cross_entropy(const Matrix& z, const std::vector<int>& labels, const std::vector<std::size_t>& rows) {
  double loss = 0.0;
  for (std::size_t r : rows) {
    double mx = z(r, 0);
    for (std::size_t c = 1; c < z.cols; ++c) mx = std::max(mx, z(r, c));
    double sum = 0.0;
    for (std::size_t c = 0; c < z.cols; ++c) sum += std::exp(z(r, c) - mx);
    loss += -(z(r, static_cast<std::size_t>(labels[r])) - mx - std::log(sum));
  }
  return rows.empty() ? 0.0 : loss / static_cast<double>(rows.size());
}

Scores score_split(const ModelState& m, const Dataset& d, const GraphContext& ctx, const LabelView& lv,
                   const Matrix* logits) {
  if (m.genotype.instance == Instance::LinkProfcf) {
    const auto& t = std::get<InteractionTable>(d);
    const Matrix s = all_link_scores(m, ctx);
    const bool has_val = std::any_of(t.val_items.begin(), t.val_items.end(),
                                     [](const auto& v) { return !v.empty(); });
    return {recall_at_k(s, t, 20, has_val ? Split::Val : Split::Test), recall_at_k(s, t, 20, Split::Test)};
  }
  return {accuracy(*logits, lv.labels, lv.val), accuracy(*logits, lv.labels, lv.test),
          mean_cross_entropy(*logits, lv.labels, lv.val)};
}

[[noreturn]] void diverged(int epoch, double loss) {
  throw Error(ErrorCode::NonFiniteLoss,
              "training diverged at epoch " + std::to_string(epoch) + " (loss " + std::to_string(loss) + ")");
}

}  // namespace

TrainResult train(ModelState& m, const Dataset& d, const HyperParams& hp, std::uint64_t seed,
                  const TrainOptions& opts) {
  hp.validate();
  check_kind(m, d);
  m.activation = hp.activation;
  const GraphContext ctx = make_context(d);
  const LabelView lv = label_view(d, opts.test_fold);
  const auto* table = std::get_if<InteractionTable>(&d);
  Rng rng(mix_seed(seed, 0x7472616e));
  Adam adam(hp.learning_rate, hp.weight_decay);
  ForwardOptions train_mode{true, hp.dropout, hp.activation};
  ForwardOptions eval_mode{false, 0.0, hp.activation};

  TrainResult r;
  ParamStore best = m.params;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    double loss_value = 0.0;
    {
      Tape t;
      Binder p(t, m.params);
      Var out = forward(p, m, ctx, train_mode, rng);
      BprBatch bpr;
      if (table) bpr = sample_bpr(*table, rng);
      Var loss = loss_of(p, m, out, lv, table ? &bpr : nullptr);
      loss_value = t.value(loss).data[0];
      if (!std::isfinite(loss_value) || std::fabs(loss_value) > kDivergedLoss) diverged(epoch, loss_value);
      t.backward(loss);
      adam.step(m.params, p.gradients());
      if (!m.params.all_finite()) diverged(epoch, loss_value);
    }
    Scores s;
    if (table) {
      s = score_split(m, d, ctx, lv, nullptr);
    } else {
      Tape t;
      Binder p(t, m.params);
      Var out = forward(p, m, ctx, eval_mode, rng);
      if (!t.value(out).all_finite()) diverged(epoch, loss_value);
      s = score_split(m, d, ctx, lv, &t.value(out));
    }
    r.history.push_back({epoch, loss_value, s.val});
    if (s.val > r.best_val) {
      r.best_val = s.val;
      r.test_at_best = s.test;
      r.val_loss_at_best = s.val_loss;
      r.best_epoch = epoch;
      best = m.params;
    } else if (epoch - r.best_epoch >= opts.patience) {
      break;
    }
  }
  m.params = std::move(best);
  return r;
}

double evaluate(const ModelState& m, const Dataset& d, const Metric& metric, Split split, int test_fold) {
  check_kind(m, d);
  check_metric(metric, d);
  const GraphContext ctx = make_context(d);
  if (const auto* table = std::get_if<InteractionTable>(&d))
    return recall_at_k(all_link_scores(m, ctx), *table, metric.k, split);
  const LabelView lv = label_view(d, test_fold);
  Tape t;
  Binder p(t, m.params);
  Rng rng(0);
  Var out = forward(p, m, ctx, ForwardOptions{false, 0.0, m.activation}, rng);
  const auto& rows = split == Split::Train ? lv.train : split == Split::Val ? lv.val : lv.test;
  return accuracy(t.value(out), lv.labels, rows);
}

double gradient_check(ModelState& m, const Dataset& d, std::size_t num_sites, std::uint64_t seed,
                      int test_fold) {
  check_kind(m, d);
  const GraphContext ctx = make_context(d);
  const LabelView lv = label_view(d, test_fold);
  const auto* table = std::get_if<InteractionTable>(&d);
  Rng rng(seed);
  BprBatch bpr;
  if (table) bpr = sample_bpr(*table, rng);
  const ForwardOptions mode{false, 0.0, m.activation};

  struct Probe {
    double loss;
    std::uint64_t signature;
  };
  auto probe = [&]() {
    Tape t;
    Binder p(t, m.params);
    Rng unused(0);
    Var loss = loss_of(p, m, forward(p, m, ctx, mode, unused), lv, table ? &bpr : nullptr);
    return Probe{t.value(loss).data[0], t.activation_signature()};
  };

  std::vector<Matrix> grads;
  std::uint64_t base_sig = 0;
  {
    Tape t;
    Binder p(t, m.params);
    Rng unused(0);
    Var loss = loss_of(p, m, forward(p, m, ctx, mode, unused), lv, table ? &bpr : nullptr);
    if (!std::isfinite(t.value(loss).data[0]))
      throw Error(ErrorCode::NonFiniteLoss, "loss is not finite at the probe point");
    t.backward(loss);
    grads = p.gradients();
    base_sig = t.activation_signature();
  }

  const double h = 1e-3;
  const std::size_t total = m.params.scalar_count();
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t attempt = 0; checked < num_sites && attempt < 50 * num_sites + 50; ++attempt) {
    std::size_t flat = static_cast<std::size_t>(rng.uniform_index(total));
    std::size_t pi = 0;
    while (flat >= m.params.value(pi).size()) flat -= m.params.value(pi++).size();
    double& w = m.params.value(pi).data[flat];
    const double w0 = w;
    w = w0 + h;
    const Probe plus = probe();
    w = w0 - h;
    const Probe minus = probe();
    w = w0;
    if (plus.signature != base_sig || minus.signature != base_sig) continue;
    if (!std::isfinite(plus.loss) || !std::isfinite(minus.loss))
      throw Error(ErrorCode::NonFiniteLoss, "loss is not finite near the probe point");
    const double fd = (plus.loss - minus.loss) / (2.0 * h);
    const double ad = grads[pi].size() ? grads[pi].data[flat] : 0.0;
    worst = std::max(worst, std::fabs(ad - fd) / std::max({1.0, std::fabs(ad), std::fabs(fd)}));
    ++checked;
  }
  if (checked < num_sites)
    throw Error(ErrorCode::InvalidParameter, "could not find enough kink-free gradient sites");
  return worst;
}

}  // namespace glagent::engine
