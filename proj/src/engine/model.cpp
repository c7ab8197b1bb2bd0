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

#include "glagent/engine/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glagent/error.hpp"
#include "glagent/rng.hpp"

namespace glagent::engine {

void HyperParams::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidParameter, what); };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) bad("learning_rate must be positive");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) bad("weight_decay must be nonnegative");
  if (!(dropout >= 0.0 && dropout < 1.0)) bad("dropout must lie in [0, 1)");
  if (activation != "relu" && activation != "identity") bad("activation must be relu or identity");
  if (epochs < 1) bad("epochs must be positive");
  if (hidden_dim < 1) bad("hidden_dim must be positive");
}

Json HyperParams::to_json() const {
  return Json{{"learning_rate", learning_rate}, {"weight_decay", weight_decay},
              {"dropout", dropout},             {"activation", activation},
              {"epochs", epochs},               {"hidden_dim", hidden_dim}};
}

HyperParams HyperParams::from_json(const Json& j) {
  HyperParams h;
  try {
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.weight_decay = j.value("weight_decay", h.weight_decay);
    h.dropout = j.value("dropout", h.dropout);
    h.activation = j.value("activation", h.activation);
    h.epochs = j.value("epochs", h.epochs);
    h.hidden_dim = j.value("hidden_dim", h.hidden_dim);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidParameter, std::string("hyperparameters: ") + e.what());
  }
  h.validate();
  return h;
}

Dims dims_for(const Dataset& d, std::size_t hidden) {
  Dims dims;
  dims.hidden = hidden;
  if (const auto* g = std::get_if<NodeGraph>(&d)) {
    dims.in_dim = g->features.cols;
    dims.num_classes = static_cast<std::size_t>(g->num_classes);
  } else if (const auto* c = std::get_if<GraphCollection>(&d)) {
    dims.in_dim = c->feature_dim;
    dims.num_classes = static_cast<std::size_t>(c->num_classes);
  } else {
    const auto& t = std::get<InteractionTable>(d);
    dims.num_users = t.num_users;
    dims.num_items = t.num_items;
  }
  return dims;
}

void ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols, Init init,
                     std::uint64_t seed) {
  if (contains(name)) return;
  Matrix m(rows, cols);
  if (init == Init::Uniform) {
    Rng rng(mix_seed(seed, fnv1a64(name)));
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(rows, 1)));
    for (double& v : m.data) v = rng.uniform(-bound, bound);
  }
  index_[name] = values_.size();
  names_.push_back(name);
  values_.push_back(std::move(m));
}

std::size_t ParamStore::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::DimensionMismatch, "no parameter named " + name);
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& m : values_) n += m.size();
  return n;
}

bool ParamStore::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](const Matrix& m) { return m.all_finite(); });
}

Var Binder::operator()(const std::string& name) {
  const std::size_t i = store_.index(name);
  if (!vars_[i]) vars_[i] = tape_.variable(store_.value(i));
  return *vars_[i];
}

std::vector<Matrix> Binder::gradients() const {
  std::vector<Matrix> out(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i]) out[i] = tape_.grad(*vars_[i]);
  return out;
}

SparseMatrix gcn_normalized(const SparseMatrix& adj, bool add_missing_self_loops) {
  SparseMatrix m;
  m.rows = adj.rows;
  m.cols = adj.cols;
  m.row_ptr.assign(adj.rows + 1, 0);
  for (std::size_t v = 0; v < adj.rows; ++v) {
    bool has_self = false;
    for (std::size_t k = adj.row_ptr[v]; k < adj.row_ptr[v + 1]; ++k) {
      if (adj.col_idx[k] == v) has_self = true;
      // Keep columns ascending when inserting the loop.
      if (add_missing_self_loops && !has_self && adj.col_idx[k] > v) {
        m.col_idx.push_back(v);
        has_self = true;
      }
      m.col_idx.push_back(adj.col_idx[k]);
    }
    if (add_missing_self_loops && !has_self) m.col_idx.push_back(v);
    m.row_ptr[v + 1] = m.col_idx.size();
  }
  std::vector<double> inv_sqrt(m.rows, 0.0);
  for (std::size_t v = 0; v < m.rows; ++v) {
    const auto deg = static_cast<double>(m.row_ptr[v + 1] - m.row_ptr[v]);
    if (deg > 0) inv_sqrt[v] = 1.0 / std::sqrt(deg);
  }
  m.values.resize(m.col_idx.size());
  for (std::size_t v = 0; v < m.rows; ++v)
    for (std::size_t k = m.row_ptr[v]; k < m.row_ptr[v + 1]; ++k)
      m.values[k] = inv_sqrt[v] * inv_sqrt[m.col_idx[k]];
  return m;
}

SparseMatrix row_normalized(const SparseMatrix& adj) {
  SparseMatrix m = adj;
  for (std::size_t v = 0; v < m.rows; ++v) {
    const std::size_t deg = m.row_ptr[v + 1] - m.row_ptr[v];
    for (std::size_t k = m.row_ptr[v]; k < m.row_ptr[v + 1]; ++k)
      m.values[k] = 1.0 / static_cast<double>(deg);
  }
  return m;
}

namespace {

void fill_operators(GraphContext& ctx, const SparseMatrix& adj, bool self_loops) {
  ctx.gcn = std::make_shared<SparseOperator>(gcn_normalized(adj, self_loops));
  ctx.mean = std::make_shared<SparseOperator>(row_normalized(adj));
  ctx.sum = std::make_shared<SparseOperator>(adj);
}

}  // namespace

GraphContext make_context(const Dataset& d) {
  GraphContext ctx;
  if (const auto* g = std::get_if<NodeGraph>(&d)) {
    ctx.num_rows = g->n;
    ctx.features = g->features;
    fill_operators(ctx, g->adj, true);
  } else if (const auto* c = std::get_if<GraphCollection>(&d)) {
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    ctx.graph_offsets.push_back(0);
    for (const auto& g : c->graphs) ctx.graph_offsets.push_back(ctx.graph_offsets.back() + g.n);
    ctx.num_rows = ctx.graph_offsets.back();
    ctx.features = Matrix(ctx.num_rows, c->feature_dim);
    for (std::size_t gi = 0; gi < c->graphs.size(); ++gi) {
      const auto& g = c->graphs[gi];
      const std::size_t base = ctx.graph_offsets[gi];
      for (std::size_t v = 0; v < g.n; ++v) {
        std::copy(g.features.row(v).begin(), g.features.row(v).end(), ctx.features.row(base + v).begin());
        for (std::size_t k = g.adj.row_ptr[v]; k < g.adj.row_ptr[v + 1]; ++k)
          arcs.emplace_back(base + g.adj.col_idx[k], base + v);
      }
    }
    fill_operators(ctx, adjacency_from_arcs(ctx.num_rows, arcs), true);
  } else {
    const auto& t = std::get<InteractionTable>(d);
    ctx.num_users = t.num_users;
    ctx.num_items = t.num_items;
    ctx.num_rows = t.num_users + t.num_items;
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    for (std::size_t u = 0; u < t.num_users; ++u)
      for (std::size_t i : t.train_items[u]) {
        arcs.emplace_back(u, t.num_users + i);
        arcs.emplace_back(t.num_users + i, u);
      }
    fill_operators(ctx, adjacency_from_arcs(ctx.num_rows, arcs), false);
  }
  return ctx;
}

bool engine_implements(const std::string& op) {
  return op == "GCN" || op == "SAGE" || op == "GIN";
}

namespace {

bool known_unimplemented(const std::string& op) {
  return op == "GAT" || op == "ChebConv" || op == "Cheb";
}

void check_agg(const std::string& op) {
  if (engine_implements(op)) return;
  if (known_unimplemented(op))
    throw Error(ErrorCode::UnsupportedOp, "aggregation " + op + " is not implemented by the engine");
  throw Error(ErrorCode::InvalidGenotype, "unknown aggregation op " + op);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidGenotype, what);
}

std::string block_prefix(std::size_t i) { return "b" + std::to_string(i + 1); }

std::string link_prefix(int comp, int layer) {
  return "c" + std::to_string(comp) + ".l" + std::to_string(layer);
}

}  // namespace

void declare_aggregation(ParamStore& store, const std::string& prefix, const std::string& op,
                         std::size_t in, std::size_t out, std::uint64_t seed) {
  using I = ParamStore::Init;
  const std::string p = prefix + "." + op + ".";
  if (op == "GCN") {
    store.add(p + "W", in, out, I::Uniform, seed);
    store.add(p + "b", 1, out, I::Zero, seed);
  } else if (op == "SAGE") {
    store.add(p + "Ws", in, out, I::Uniform, seed);
    store.add(p + "Wn", in, out, I::Uniform, seed);
    store.add(p + "b", 1, out, I::Zero, seed);
  } else if (op == "GIN") {
    store.add(p + "W1", in, out, I::Uniform, seed);
    store.add(p + "b1", 1, out, I::Zero, seed);
    store.add(p + "W2", out, out, I::Uniform, seed);
    store.add(p + "b2", 1, out, I::Zero, seed);
  } else {
    check_agg(op);
  }
}

Var aggregate(Binder& p, const std::string& prefix, const std::string& op, Var x,
              const GraphContext& ctx) {
  Tape& t = p.tape();
  const std::string q = prefix + "." + op + ".";
  if (op == "GCN") {
    return add_row(t, matmul(t, spmm(t, ctx.gcn, x), p(q + "W")), p(q + "b"));
  }
  if (op == "SAGE") {
    Var self = matmul(t, x, p(q + "Ws"));
    Var neigh = matmul(t, spmm(t, ctx.mean, x), p(q + "Wn"));
    return add_row(t, add(t, self, neigh), p(q + "b"));
  }
  if (op == "GIN") {
    Var z = add(t, x, spmm(t, ctx.sum, x));
    Var h = relu(t, add_row(t, matmul(t, z, p(q + "W1")), p(q + "b1")));
    return add_row(t, matmul(t, h, p(q + "W2")), p(q + "b2"));
  }
  check_agg(op);
  return x;
}

Var activate(Tape& t, Var x, const std::string& activation) {
  if (activation == "relu") return relu(t, x);
  if (activation == "identity") return x;
  throw Error(ErrorCode::InvalidParameter, "unknown activation " + activation);
}

Var readout(Tape& t, Var h, const std::string& op, const GraphContext& ctx) {
  if (op == "global_sum") return segment_sum(t, h, ctx.graph_offsets);
  if (op == "global_mean") return segment_mean(t, h, ctx.graph_offsets);
  throw Error(ErrorCode::InvalidGenotype, "unknown readout " + op);
}

Var linear(Binder& p, const std::string& prefix, Var x) {
  Tape& t = p.tape();
  return add_row(t, matmul(t, x, p(prefix + ".W")), p(prefix + ".b"));
}

ModelState build_model(const Genotype& g, const Dims& dims, std::uint64_t seed) {
  using I = ParamStore::Init;
  ModelState m;
  m.genotype = g;
  m.dims = dims;
  m.seed = seed;
  const std::size_t h = dims.hidden;
  require(h > 0, "hidden dimension must be positive");
  if (g.instance == Instance::LinkProfcf) {
    const LinkGene& l = g.link;
    require(dims.num_users > 0 && dims.num_items > 0, "link model needs users and items");
    require(l.message == "IDENTITY" || l.message == "HADAMARD", "unknown message function " + l.message);
    require(l.aggregation == "NONE" || l.aggregation == "GCN" || l.aggregation == "SAGE",
            "unknown link aggregation " + l.aggregation);
    require(l.layer_comb == "STACK" || l.layer_comb == "SUM", "unknown layer combination " + l.layer_comb);
    require(l.comp_comb == "MEAN", "unknown component combination " + l.comp_comb);
    require(l.interaction == "DOT" || l.interaction == "CONCAT_MLP",
            "unknown interaction " + l.interaction);
    require(l.num_layers >= 1 && l.num_components >= 1, "layer and component counts must be positive");
    m.params.add("emb", dims.num_users + dims.num_items, h, I::Uniform, seed);
    // Embedding rows use the hidden width as fan-in rather than the row count.
    {
      Matrix& e = m.params.value(m.params.index("emb"));
      Rng rng(mix_seed(seed, fnv1a64("emb")));
      const double bound = 1.0 / std::sqrt(static_cast<double>(h));
      for (double& v : e.data) v = rng.uniform(-bound, bound);
    }
    if (l.aggregation != "NONE")
      for (int c = 0; c < l.num_components; ++c)
        for (int k = 0; k < l.num_layers; ++k)
          declare_aggregation(m.params, link_prefix(c, k), l.aggregation, h, h, seed);
    if (l.interaction == "CONCAT_MLP") {
      m.params.add("mlp1.W", 2 * h, h, I::Uniform, seed);
      m.params.add("mlp1.b", 1, h, I::Zero, seed);
      m.params.add("mlp2.W", h, 1, I::Uniform, seed);
      m.params.add("mlp2.b", 1, 1, I::Zero, seed);
    }
    return m;
  }
  require(!g.blocks.empty(), "genotype has no blocks");
  require(g.blocks.size() <= 4, "at most 4 blocks are supported");
  require(dims.in_dim > 0 && dims.num_classes > 0, "node/graph model needs input and class dims");
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    const BlockGene& b = g.blocks[i];
    require(!b.inputs.empty(), "block without inputs");
    for (std::size_t k = 0; k < b.inputs.size(); ++k) {
      require(b.inputs[k] >= 0 && b.inputs[k] <= static_cast<int>(i), "block input out of range");
      require(k == 0 || b.inputs[k] > b.inputs[k - 1], "block inputs must be sorted and unique");
    }
    require(b.fuse == "sum" || b.fuse == "mean", "unknown fusion " + b.fuse);
    check_agg(b.agg);
  }
  if (g.instance == Instance::GraphLrgnn)
    require(g.readout == "global_sum" || g.readout == "global_mean", "unknown readout " + g.readout);
  m.params.add("pre.W", dims.in_dim, h, I::Uniform, seed);
  m.params.add("pre.b", 1, h, I::Zero, seed);
  for (std::size_t i = 0; i < g.blocks.size(); ++i)
    declare_aggregation(m.params, block_prefix(i), g.blocks[i].agg, h, h, seed);
  m.params.add("cls.W", h, dims.num_classes, I::Uniform, seed);
  m.params.add("cls.b", 1, dims.num_classes, I::Zero, seed);
  return m;
}

namespace {

Var drop(Tape& t, Var x, const ForwardOptions& o, Rng& rng) {
  return o.training && o.dropout > 0.0 ? dropout(t, x, o.dropout, rng) : x;
}

Var forward_blocks(Binder& p, const ModelState& m, const GraphContext& ctx,
                   const ForwardOptions& o, Rng& rng) {
  Tape& t = p.tape();
  if (ctx.features.cols != m.dims.in_dim)
    throw Error(ErrorCode::DimensionMismatch, "feature width " + std::to_string(ctx.features.cols) +
                                                  " vs model input " + std::to_string(m.dims.in_dim));
  Var x = t.constant(ctx.features);
  std::vector<Var> reps{activate(t, linear(p, "pre", drop(t, x, o, rng)), o.activation)};
  Var total{};
  for (std::size_t i = 0; i < m.genotype.blocks.size(); ++i) {
    const BlockGene& b = m.genotype.blocks[i];
    Var fused = reps[static_cast<std::size_t>(b.inputs[0])];
    for (std::size_t k = 1; k < b.inputs.size(); ++k)
      fused = add(t, fused, reps[static_cast<std::size_t>(b.inputs[k])]);
    if (b.inputs.size() > 1 && b.fuse == "mean")
      fused = scale(t, fused, 1.0 / static_cast<double>(b.inputs.size()));
    Var out = activate(t, aggregate(p, block_prefix(i), b.agg, drop(t, fused, o, rng), ctx), o.activation);
    reps.push_back(out);
    total = i == 0 ? out : add(t, total, out);
  }
  if (m.genotype.instance == Instance::GraphLrgnn) total = readout(t, total, m.genotype.readout, ctx);
  return linear(p, "cls", drop(t, total, o, rng));
}

Var forward_link(Binder& p, const ModelState& m, const GraphContext& ctx, const ForwardOptions& o,
                 Rng& rng) {
  Tape& t = p.tape();
  const LinkGene& l = m.genotype.link;
  Var emb = p("emb");
  if (t.value(emb).rows != ctx.num_rows)
    throw Error(ErrorCode::DimensionMismatch, "embedding rows do not match users + items");
  if (l.aggregation == "NONE") return emb;
  Var combined{};
  for (int c = 0; c < l.num_components; ++c) {
    Var hcur = emb;
    Var layer_sum = emb;
    for (int k = 0; k < l.num_layers; ++k) {
      const std::string prefix = link_prefix(c, k);
      const std::string q = prefix + "." + l.aggregation + ".";
      Var in = drop(t, hcur, o, rng);
      Var neigh = spmm(t, l.aggregation == "GCN" ? ctx.gcn : ctx.mean, in);
      if (l.message == "HADAMARD") neigh = hadamard(t, neigh, in);
      Var next;
      if (l.aggregation == "GCN") {
        next = add_row(t, matmul(t, neigh, p(q + "W")), p(q + "b"));
      } else {
        next = add_row(t, add(t, matmul(t, in, p(q + "Ws")), matmul(t, neigh, p(q + "Wn"))), p(q + "b"));
      }
      hcur = activate(t, next, o.activation);
      if (l.layer_comb == "SUM") layer_sum = add(t, layer_sum, hcur);
    }
    Var comp = l.layer_comb == "SUM" ? layer_sum : hcur;
    combined = c == 0 ? comp : add(t, combined, comp);
  }
  if (l.num_components > 1) combined = scale(t, combined, 1.0 / l.num_components);
  return combined;
}

}  // namespace

Var forward(Binder& p, const ModelState& m, const GraphContext& ctx, const ForwardOptions& o, Rng& rng) {
  if (m.genotype.instance == Instance::LinkProfcf) return forward_link(p, m, ctx, o, rng);
  return forward_blocks(p, m, ctx, o, rng);
}

Var link_scores(Binder& p, const ModelState& m, Var rep, std::span<const std::size_t> users,
                std::span<const std::size_t> items) {
  Tape& t = p.tape();
  std::vector<std::size_t> item_rows(items.begin(), items.end());
  for (auto& i : item_rows) i += m.dims.num_users;
  Var ru = gather_rows(t, rep, users);
  Var ri = gather_rows(t, rep, item_rows);
  if (m.genotype.link.interaction == "DOT") return row_dot(t, ru, ri);
  Var hidden = relu(t, linear(p, "mlp1", concat_cols(t, ru, ri)));
  return linear(p, "mlp2", hidden);
}

Matrix all_link_scores(const ModelState& m, const GraphContext& ctx) {
  Tape t;
  Binder p(t, m.params);
  Rng rng(0);
  ForwardOptions o;
  o.activation = m.activation;
  Var rep = forward(p, m, ctx, o, rng);
  const std::size_t U = m.dims.num_users, I = m.dims.num_items;
  Matrix scores(U, I);
  if (m.genotype.link.interaction == "DOT") {
    const Matrix& r = t.value(rep);
    for (std::size_t u = 0; u < U; ++u)
      for (std::size_t i = 0; i < I; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < r.cols; ++k) acc += r(u, k) * r(U + i, k);
        scores(u, i) = acc;
      }
    return scores;
  }
  std::vector<std::size_t> users, items;
  users.reserve(U * I);
  items.reserve(U * I);
  for (std::size_t u = 0; u < U; ++u)
    for (std::size_t i = 0; i < I; ++i) {
      users.push_back(u);
      items.push_back(i);
    }
  const Matrix& s = t.value(link_scores(p, m, rep, users, items));
  std::copy(s.data.begin(), s.data.end(), scores.data.begin());
  return scores;
}

}  // namespace glagent::engine
