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
#include <numeric>

#include "glagent/engine/dataset.hpp"
#include "glagent/engine/model.hpp"
#include "glagent/engine/train.hpp"
#include "glagent/error.hpp"
#include "glagent/rng.hpp"
#include "test_util.hpp"

namespace glagent::engine {
namespace {

using testing::test_data;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoFailure;
}

Matrix dense(const SparseMatrix& s) {
  Matrix d(s.rows, s.cols);
  for (std::size_t r = 0; r < s.rows; ++r)
    for (std::size_t k = s.row_ptr[r]; k < s.row_ptr[r + 1]; ++k) d(r, s.col_idx[k]) += s.values[k];
  return d;
}

Matrix plus_bias(Matrix m, const Matrix& b) {
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) += b(0, c);
  return m;
}

void expect_near(const Matrix& a, const Matrix& b, double tol) {
  ASSERT_TRUE(a.same_shape(b));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.data[i], b.data[i], tol) << "entry " << i;
}

Genotype node_genotype() {
  Genotype g;
  g.instance = Instance::NodeF2gnn;
  g.blocks = {{"GCN", {0}, "sum"}, {"SAGE", {0, 1}, "mean"}};
  return g;
}

Genotype graph_genotype(const std::string& readout) {
  Genotype g;
  g.instance = Instance::GraphLrgnn;
  g.blocks = {{"GIN", {0}, "sum"}, {"GCN", {0, 1}, "sum"}};
  g.readout = readout;
  return g;
}

Genotype link_genotype(const std::string& agg, const std::string& interaction, int layers = 1) {
  Genotype g;
  g.instance = Instance::LinkProfcf;
  g.link = LinkGene{"IDENTITY", agg, layers, "STACK", 1, "MEAN", interaction};
  return g;
}

TEST(Loaders, NodeDirectory) {
  const NodeGraph g = load_node_dir(test_data("tiny_node"));
  EXPECT_EQ(g.n, 3u);
  EXPECT_EQ(g.features.cols, 2u);
  EXPECT_DOUBLE_EQ(g.features(2, 1), 0.5);
  EXPECT_EQ(g.labels, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(g.num_classes, 2);
  EXPECT_TRUE(g.has_arc(0, 1));
  EXPECT_TRUE(g.has_arc(1, 2));
  EXPECT_FALSE(g.has_arc(1, 0));
  EXPECT_EQ(g.splits.val, std::vector<std::size_t>{1});
  EXPECT_EQ(code_of([] { load_node_dir(test_data("bad_edge")); }), ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([] { load_node_dir(test_data("missing_dir")); }), ErrorCode::IoFailure);
}

TEST(Loaders, GraphJsonlAndRatings) {
  const GraphCollection c = load_graph_jsonl(test_data("tiny_graphs.jsonl"));
  EXPECT_EQ(c.graphs.size(), 4u);
  EXPECT_EQ(c.labels, (std::vector<int>{0, 1, 0, 1}));
  EXPECT_EQ(c.folds, (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(c.num_folds, 2);
  EXPECT_EQ(c.feature_dim, 1u);

  const InteractionTable t = load_ratings_tsv(test_data("tiny_ratings.tsv"));
  EXPECT_EQ(t.num_users, 2u);
  EXPECT_EQ(t.num_items, 3u);
  EXPECT_EQ(t.train_items[0], std::vector<std::size_t>{0});
  EXPECT_EQ(t.val_items[1], std::vector<std::size_t>{0});
  EXPECT_EQ(t.test_items[1], std::vector<std::size_t>{2});
  EXPECT_EQ(code_of([] { load_dataset("csv", "x"); }), ErrorCode::InvalidConfig);
}

TEST(Generators, SbmIsDeterministicAndPlanted) {
  SbmParams p;
  p.n = 40;
  p.num_classes = 4;
  p.seed = 3;
  const NodeGraph a = generate_sbm(p), b = generate_sbm(p);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.adj.col_idx, b.adj.col_idx);
  for (std::size_t v = 0; v < a.n; ++v) {
    EXPECT_EQ(a.labels[v], static_cast<int>(v % 4));
    EXPECT_FALSE(a.has_arc(v, v));
  }
  for (std::size_t v = 0; v < a.n; ++v)
    for (std::size_t u = 0; u < a.n; ++u) EXPECT_EQ(a.has_arc(u, v), a.has_arc(v, u));
  p.p_out = 0.5;
  EXPECT_EQ(code_of([&] { generate_sbm(p); }), ErrorCode::InvalidProbability);
}

TEST(Generators, MotifGraphsCarryChordsForClassOne) {
  MotifParams p;
  p.num_graphs = 6;
  p.nodes_per_graph = 8;
  const GraphCollection c = generate_graph_collection(p);
  ASSERT_EQ(c.graphs.size(), 6u);
  for (std::size_t i = 0; i < c.graphs.size(); ++i) {
    // A path on 8 nodes has 7 edges; the chords (i, i+2) for even i add 3 more.
    const std::size_t edges = c.graphs[i].num_arcs() / 2;
    EXPECT_EQ(edges, c.labels[i] == 0 ? 7u : 10u) << "graph " << i;
  }
}

TEST(Transforms, SelfLoopsUndirectedNormalize) {
  Dataset d = load_node_dir(test_data("tiny_node"));
  d = apply_transform(d, "ToUndirected");
  const auto& u = std::get<NodeGraph>(d);
  EXPECT_TRUE(u.has_arc(1, 0));
  EXPECT_EQ(u.num_arcs(), 4u);
  d = apply_transform(d, "AddSelfLoops");
  EXPECT_EQ(std::get<NodeGraph>(d).num_arcs(), 7u);
  d = apply_transform(d, "AddSelfLoops");
  EXPECT_EQ(std::get<NodeGraph>(d).num_arcs(), 7u);

  NodeGraph g = std::get<NodeGraph>(d);
  g.features(0, 0) = -3.0;
  g.features(0, 1) = 1.0;
  g.features(1, 0) = 0.0;
  g.features(1, 1) = 0.0;
  g = normalize_features(g);
  EXPECT_DOUBLE_EQ(g.features(0, 0), -0.75);
  EXPECT_DOUBLE_EQ(g.features(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(g.features(1, 1), 0.0);

  const Dataset t = load_ratings_tsv(test_data("tiny_ratings.tsv"));
  EXPECT_NO_THROW(apply_transform(t, "ToUndirected"));
  EXPECT_EQ(code_of([&] { apply_transform(t, "AddSelfLoops"); }), ErrorCode::InapplicableTransform);
  EXPECT_EQ(code_of([&] { apply_transform(t, "Magic"); }), ErrorCode::InapplicableTransform);
}

// GCN output equals D^-1/2 (A + I) D^-1/2 X W + b computed densely.
TEST(Layers, GcnMatchesDenseFormula) {
  Dataset d = apply_transform(load_node_dir(test_data("tiny_node")), "ToUndirected");
  const NodeGraph& g = std::get<NodeGraph>(d);
  const GraphContext ctx = make_context(d);
  ParamStore store;
  declare_aggregation(store, "t", "GCN", 2, 3, 5);
  Tape tape;
  Binder p(tape, store);
  const Var y = aggregate(p, "t", "GCN", tape.constant(g.features), ctx);

  Matrix a = dense(g.adj);
  for (std::size_t v = 0; v < g.n; ++v) a(v, v) += 1.0;
  std::vector<double> deg(g.n, 0.0);
  for (std::size_t v = 0; v < g.n; ++v)
    for (std::size_t u = 0; u < g.n; ++u) deg[v] += a(v, u);
  for (std::size_t v = 0; v < g.n; ++v)
    for (std::size_t u = 0; u < g.n; ++u) a(v, u) /= std::sqrt(deg[v] * deg[u]);
  const Matrix expected = plus_bias(matmul(matmul(a, g.features), store.value("t.GCN.W")), store.value("t.GCN.b"));
  expect_near(tape.value(y), expected, 1e-12);
}

// Without edges the normalized operator is the identity, so GCN reduces to X W.
TEST(Layers, GcnOnSelfLoopsOnlyIsLinear) {
  NodeGraph g;
  g.n = 4;
  g.adj = adjacency_from_arcs(4, {{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  Rng rng(9);
  g.features = Matrix(4, 3);
  for (double& x : g.features.data) x = rng.normal();
  const GraphContext ctx = make_context(Dataset{g});
  ParamStore store;
  declare_aggregation(store, "t", "GCN", 3, 2, 1);
  EXPECT_EQ(store.value("t.GCN.b"), Matrix(1, 2));
  Tape tape;
  Binder p(tape, store);
  const Var y = aggregate(p, "t", "GCN", tape.constant(g.features), ctx);
  expect_near(tape.value(y), matmul(g.features, store.value("t.GCN.W")), 1e-14);
}

TEST(Layers, SageUsesSelfAndNeighbourMean) {
  Dataset d = apply_transform(load_node_dir(test_data("tiny_node")), "ToUndirected");
  const NodeGraph& g = std::get<NodeGraph>(d);
  const GraphContext ctx = make_context(d);
  ParamStore store;
  declare_aggregation(store, "s", "SAGE", 2, 2, 8);
  Tape tape;
  Binder p(tape, store);
  const Var y = aggregate(p, "s", "SAGE", tape.constant(g.features), ctx);

  // Node 1 neighbours 0 and 2; nodes 0 and 2 neighbour only 1.
  Matrix mean(3, 2);
  for (std::size_t c = 0; c < 2; ++c) {
    mean(0, c) = g.features(1, c);
    mean(2, c) = g.features(1, c);
    mean(1, c) = 0.5 * (g.features(0, c) + g.features(2, c));
  }
  Matrix expected = matmul(g.features, store.value("s.SAGE.Ws"));
  const Matrix neigh = matmul(mean, store.value("s.SAGE.Wn"));
  for (std::size_t i = 0; i < expected.size(); ++i) expected.data[i] += neigh.data[i];
  expect_near(tape.value(y), plus_bias(expected, store.value("s.SAGE.b")), 1e-12);
}

TEST(Model, ParameterInitIsPerNameAndSeeded) {
  const NodeGraph g = testing::desk_sbm();
  const Dims dims = dims_for(Dataset{g}, 8);
  const ModelState a = build_model(node_genotype(), dims, 4);
  const ModelState b = build_model(node_genotype(), dims, 4);
  const ModelState c = build_model(node_genotype(), dims, 5);
  EXPECT_EQ(a.params.value("pre.W"), b.params.value("pre.W"));
  EXPECT_NE(a.params.value("pre.W"), c.params.value("pre.W"));
  Genotype other = node_genotype();
  other.blocks[1].agg = "GIN";
  EXPECT_EQ(build_model(other, dims, 4).params.value("b1.GCN.W"), a.params.value("b1.GCN.W"));
  const double bound = 1.0 / std::sqrt(8.0);
  for (double v : a.params.value("pre.W").data) EXPECT_LE(std::fabs(v), bound);

  Genotype bad = node_genotype();
  bad.blocks[0].inputs = {1};
  EXPECT_EQ(code_of([&] { build_model(bad, dims, 1); }), ErrorCode::InvalidGenotype);
  bad = node_genotype();
  bad.blocks[0].agg = "GAT";
  EXPECT_EQ(code_of([&] { build_model(bad, dims, 1); }), ErrorCode::UnsupportedOp);
}

TEST(Model, ReadoutIsPermutationInvariant) {
  const std::vector<std::pair<std::size_t, std::size_t>> arcs{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 4}};
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};  // old id -> new id
  Rng rng(2);
  Matrix x(5, 3);
  for (double& v : x.data) v = rng.normal();

  auto collection = [&](bool permuted) {
    NodeGraph g;
    g.n = 5;
    std::vector<std::pair<std::size_t, std::size_t>> a;
    for (auto [s, t] : arcs) {
      if (permuted) s = perm[s], t = perm[t];
      a.emplace_back(s, t);
      a.emplace_back(t, s);
    }
    g.adj = adjacency_from_arcs(5, a);
    g.features = Matrix(5, 3);
    for (std::size_t v = 0; v < 5; ++v)
      std::copy(x.row(v).begin(), x.row(v).end(), g.features.row(permuted ? perm[v] : v).begin());
    GraphCollection c;
    c.graphs = {g};
    c.labels = {1};
    c.folds = {0};
    c.num_folds = 1;
    c.num_classes = 2;
    c.feature_dim = 3;
    return Dataset{c};
  };

  for (const char* ro : {"global_sum", "global_mean"}) {
    const Dataset d0 = collection(false), d1 = collection(true);
    const ModelState m = build_model(graph_genotype(ro), dims_for(d0, 6), 11);
    auto logits = [&](const Dataset& d) {
      Tape t;
      Binder p(t, m.params);
      Rng r(0);
      return t.value(forward(p, m, make_context(d), ForwardOptions{}, r));
    };
    const Matrix a = logits(d0), b = logits(d1);
    ASSERT_EQ(a.rows, 1u);
    expect_near(a, b, 1e-12);
  }
}

// NONE aggregation with DOT interaction is plain matrix factorization.
TEST(Model, LinkNoneDotIsMatrixFactorization) {
  InteractionParams ip;
  ip.num_users = 6;
  ip.num_items = 9;
  ip.seed = 4;
  const Dataset d = generate_interactions(ip);
  const ModelState m = build_model(link_genotype("NONE", "DOT"), dims_for(d, 5), 3);
  const Matrix& emb = m.params.value("emb");
  ASSERT_EQ(emb.rows, 15u);
  const Matrix s = all_link_scores(m, make_context(d));
  for (std::size_t u = 0; u < 6; ++u)
    for (std::size_t i = 0; i < 9; ++i) {
      double dot = 0.0;
      for (std::size_t k = 0; k < 5; ++k) dot += emb(u, k) * emb(6 + i, k);
      EXPECT_DOUBLE_EQ(s(u, i), dot);
    }
}

TEST(Metrics, RecallAtKByHand) {
  const InteractionTable t = load_ratings_tsv(test_data("tiny_ratings.tsv"));
  Matrix s(2, 3);
  // User 0 candidates {1, 2}; user 1 candidates {0, 2}.
  s(0, 0) = 9.0, s(0, 1) = 0.5, s(0, 2) = 0.7;
  s(1, 0) = 0.9, s(1, 1) = 5.0, s(1, 2) = 0.1;
  EXPECT_DOUBLE_EQ(recall_at_k(s, t, 1, Split::Test), 0.5);
  EXPECT_DOUBLE_EQ(recall_at_k(s, t, 2, Split::Test), 1.0);
  EXPECT_DOUBLE_EQ(recall_at_k(s, t, 1, Split::Val), 0.5);
  // Ties go to the lower item id.
  s(1, 0) = 0.3, s(1, 2) = 0.3;
  EXPECT_DOUBLE_EQ(recall_at_k(s, t, 1, Split::Test), 0.5);
  s(1, 2) = 0.31;
  EXPECT_DOUBLE_EQ(recall_at_k(s, t, 1, Split::Test), 1.0);
}

TEST(Metrics, AccuracyCountsArgmaxOverRows) {
  Matrix logits(3, 2);
  logits(0, 0) = 1, logits(1, 1) = 1, logits(2, 0) = 1;
  const std::vector<int> labels{0, 0, 0};
  const std::vector<std::size_t> rows{0, 1, 2};
  EXPECT_DOUBLE_EQ(accuracy(logits, labels, rows), 2.0 / 3.0);
  const std::vector<std::size_t> some{0, 2};
  EXPECT_DOUBLE_EQ(accuracy(logits, labels, some), 1.0);
}

TEST(Folds, ValidationIsCarvedFromTrainingFolds) {
  MotifParams p;
  p.num_graphs = 24;
  p.num_folds = 3;
  const GraphCollection c = generate_graph_collection(p);
  const GraphFolds f = fold_split(c, 1);
  std::vector<int> seen(c.graphs.size(), 0);
  for (auto* part : {&f.train, &f.val, &f.test})
    for (std::size_t i : *part) ++seen[i];
  for (int s : seen) EXPECT_EQ(s, 1);
  for (std::size_t i : f.test) EXPECT_EQ(c.folds[i], 1);
  for (std::size_t i : f.val) EXPECT_NE(c.folds[i], 1);
  EXPECT_FALSE(f.val.empty());
}

TEST(Gradients, MatchCentralDifferences) {
  const Dataset node = testing::desk_sbm();
  ModelState mn = build_model(node_genotype(), dims_for(node, 8), 1);
  EXPECT_LE(gradient_check(mn, node, 20, 1), 1e-4);

  MotifParams mp;
  mp.num_graphs = 8;
  mp.nodes_per_graph = 6;
  const Dataset graph = generate_graph_collection(mp);
  ModelState mg = build_model(graph_genotype("global_mean"), dims_for(graph, 6), 2);
  EXPECT_LE(gradient_check(mg, graph, 20, 2), 1e-4);

  InteractionParams ip;
  ip.num_users = 8;
  ip.num_items = 10;
  ip.density = 0.3;
  const Dataset link = generate_interactions(ip);
  Genotype lg = link_genotype("GCN", "CONCAT_MLP", 2);
  lg.link.message = "HADAMARD";
  lg.link.layer_comb = "SUM";
  lg.link.num_components = 2;
  ModelState ml = build_model(lg, dims_for(link, 4), 3);
  EXPECT_LE(gradient_check(ml, link, 20, 3), 1e-4);
}

TEST(Training, LearnsSeparableSbm) {
  const Dataset d = testing::desk_sbm(3.0);
  ModelState m = build_model(node_genotype(), dims_for(d, 16), 7);
  HyperParams hp;
  hp.epochs = 100;
  const TrainResult r = train(m, d, hp, 7);
  EXPECT_GE(r.best_val, 0.85);
  EXPECT_DOUBLE_EQ(evaluate(m, d, Metric::accuracy(), Split::Val), r.best_val);
  EXPECT_DOUBLE_EQ(evaluate(m, d, Metric::accuracy(), Split::Test), r.test_at_best);
  EXPECT_TRUE(std::isfinite(r.val_loss_at_best));

  ModelState again = build_model(node_genotype(), dims_for(d, 16), 7);
  const TrainResult r2 = train(again, d, hp, 7);
  EXPECT_EQ(r2.best_val, r.best_val);
  EXPECT_EQ(r2.history.size(), r.history.size());
  EXPECT_EQ(again.params.value("cls.W"), m.params.value("cls.W"));
}

TEST(Training, RejectsBadInputs) {
  const Dataset d = testing::desk_sbm();
  ModelState m = build_model(node_genotype(), dims_for(d, 8), 1);
  HyperParams hp;
  hp.dropout = 1.0;
  EXPECT_EQ(code_of([&] { train(m, d, hp, 1); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([&] { evaluate(m, d, Metric::recall_at(20)); }), ErrorCode::MetricMismatch);
  hp = HyperParams{};
  hp.learning_rate = 1e6;
  hp.activation = "identity";
  EXPECT_EQ(code_of([&] { train(m, d, hp, 1); }), ErrorCode::NonFiniteLoss);
}

}  // namespace
}  // namespace glagent::engine
