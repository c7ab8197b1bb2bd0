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

#include "glagent/engine/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "glagent/error.hpp"
#include "glagent/json.hpp"
#include "glagent/rng.hpp"

namespace glagent::engine {

namespace fs = std::filesystem;

bool NodeGraph::has_arc(std::size_t src, std::size_t dst) const {
  if (dst >= adj.rows) return false;
  auto begin = adj.col_idx.begin() + static_cast<std::ptrdiff_t>(adj.row_ptr[dst]);
  auto end = adj.col_idx.begin() + static_cast<std::ptrdiff_t>(adj.row_ptr[dst + 1]);
  return std::binary_search(begin, end, src);
}

void InteractionTable::index() {
  train_items.assign(num_users, {});
  val_items.assign(num_users, {});
  test_items.assign(num_users, {});
  for (const auto& t : triples) {
    if (t.user >= num_users || t.item >= num_items)
      throw Error(ErrorCode::SchemaViolation, "interaction (" + std::to_string(t.user) + ", " +
                                                  std::to_string(t.item) + ") out of bounds");
    auto& list = t.split == SplitTag::Train ? train_items
                 : t.split == SplitTag::Val ? val_items
                                            : test_items;
    list[t.user].push_back(t.item);
  }
  for (auto* lists : {&train_items, &val_items, &test_items}) {
    for (std::size_t u = 0; u < num_users; ++u) {
      auto& items = (*lists)[u];
      std::sort(items.begin(), items.end());
      if (std::adjacent_find(items.begin(), items.end()) != items.end())
        throw Error(ErrorCode::SchemaViolation,
                    "duplicate (user, item) within a split for user " + std::to_string(u));
    }
  }
}

const char* dataset_kind(const Dataset& d) noexcept {
  switch (d.index()) {
    case 0: return "node";
    case 1: return "graph";
    default: return "link";
  }
}

SparseMatrix adjacency_from_arcs(std::size_t n,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& arcs) {
  std::vector<std::vector<std::size_t>> in(n);
  for (const auto& [src, dst] : arcs) {
    if (src >= n || dst >= n)
      throw Error(ErrorCode::SchemaViolation, "arc (" + std::to_string(src) + ", " +
                                                  std::to_string(dst) + ") with n=" +
                                                  std::to_string(n));
    in[dst].push_back(src);
  }
  SparseMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    auto& row = in[v];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    m.row_ptr[v + 1] = m.row_ptr[v] + row.size();
    m.col_idx.insert(m.col_idx.end(), row.begin(), row.end());
  }
  m.values.assign(m.col_idx.size(), 1.0);
  return m;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> arcs_of(const NodeGraph& g) {
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  arcs.reserve(g.adj.nnz());
  for (std::size_t v = 0; v < g.n; ++v)
    for (std::size_t k = g.adj.row_ptr[v]; k < g.adj.row_ptr[v + 1]; ++k)
      arcs.emplace_back(g.adj.col_idx[k], v);
  return arcs;
}

std::ifstream open_or_throw(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + p.string());
  return in;
}

[[noreturn]] void schema(const fs::path& file, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation,
              file.filename().string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) {
    auto b = field.find_first_not_of(" \t\r");
    auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_index(const std::string& s, std::size_t& out) {
  if (s.empty() || s[0] == '-') return false;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  out = static_cast<std::size_t>(v);
  return end == s.c_str() + s.size();
}

// Per class: shuffle, then 60% train, 20% val, rest test. Each list sorted.
Splits stratified_split(const std::vector<int>& labels, int num_classes, Rng& rng) {
  Splits s;
  for (int c = 0; c < num_classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < labels.size(); ++v)
      if (labels[v] == c) members.push_back(v);
    rng.shuffle(members);
    const std::size_t m = members.size();
    std::size_t n_train = static_cast<std::size_t>(std::llround(0.6 * static_cast<double>(m)));
    std::size_t n_val = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(m)));
    if (n_train + n_val > m) n_val = m - n_train;
    for (std::size_t i = 0; i < m; ++i) {
      auto& dst = i < n_train ? s.train : i < n_train + n_val ? s.val : s.test;
      dst.push_back(members[i]);
    }
  }
  for (auto* v : {&s.train, &s.val, &s.test}) std::sort(v->begin(), v->end());
  return s;
}

void check_splits(const NodeGraph& g) {
  std::vector<int> seen(g.n, 0);
  for (const auto* part : {&g.splits.train, &g.splits.val, &g.splits.test}) {
    if (part->empty()) throw Error(ErrorCode::SchemaViolation, "empty split");
    for (std::size_t v : *part) {
      if (v >= g.n) throw Error(ErrorCode::SchemaViolation, "split index out of range");
      if (seen[v]++) throw Error(ErrorCode::SchemaViolation, "splits overlap at node " + std::to_string(v));
    }
  }
}

}  // namespace

NodeGraph load_node_dir(const fs::path& dir) {
  NodeGraph g;
  const fs::path nodes_file = dir / "nodes.csv";
  std::ifstream nodes = open_or_throw(nodes_file);
  std::map<std::size_t, std::pair<std::vector<double>, int>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  bool dim_known = false;
  while (std::getline(nodes, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_fields(line, ',');
    std::size_t id = 0;
    if (!parse_index(f[0], id)) {
      if (lineno == 1) continue;  // header
      schema(nodes_file, lineno, "bad node id '" + f[0] + "'");
    }
    if (f.size() < 2) schema(nodes_file, lineno, "expected id, features..., label");
    std::vector<double> feats;
    for (std::size_t k = 1; k + 1 < f.size(); ++k) {
      double v = 0;
      if (!parse_double(f[k], v)) schema(nodes_file, lineno, "bad feature '" + f[k] + "'");
      feats.push_back(v);
    }
    std::size_t label = 0;
    if (!parse_index(f.back(), label)) schema(nodes_file, lineno, "bad label '" + f.back() + "'");
    if (!dim_known) {
      dim = feats.size();
      dim_known = true;
    } else if (feats.size() != dim) {
      schema(nodes_file, lineno, "feature count differs from earlier rows");
    }
    if (!rows.emplace(id, std::make_pair(std::move(feats), static_cast<int>(label))).second)
      schema(nodes_file, lineno, "duplicate node id " + std::to_string(id));
  }
  g.n = rows.size();
  if (g.n == 0) throw Error(ErrorCode::SchemaViolation, "nodes.csv has no rows");
  if (rows.rbegin()->first != g.n - 1)
    throw Error(ErrorCode::SchemaViolation, "node ids must be 0..n-1");
  g.features = Matrix(g.n, dim);
  g.labels.resize(g.n);
  for (const auto& [id, row] : rows) {
    std::copy(row.first.begin(), row.first.end(), g.features.row(id).begin());
    g.labels[id] = row.second;
    g.num_classes = std::max(g.num_classes, row.second + 1);
  }

  const fs::path edges_file = dir / "edges.tsv";
  std::ifstream edges = open_or_throw(edges_file);
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  lineno = 0;
  while (std::getline(edges, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_fields(line, '\t');
    std::size_t s = 0, d = 0;
    if (f.size() != 2 || !parse_index(f[0], s) || !parse_index(f[1], d))
      schema(edges_file, lineno, "expected src<TAB>dst");
    if (s >= g.n || d >= g.n)
      schema(edges_file, lineno, "edge references node " + std::to_string(std::max(s, d)) +
                                     " of " + std::to_string(g.n));
    arcs.emplace_back(s, d);
  }
  g.adj = adjacency_from_arcs(g.n, arcs);

  const fs::path split_file = dir / "splits.json";
  if (fs::exists(split_file)) {
    std::ifstream in = open_or_throw(split_file);
    try {
      Json j = Json::parse(in);
      g.splits.train = j.at("train").get<std::vector<std::size_t>>();
      g.splits.val = j.at("val").get<std::vector<std::size_t>>();
      g.splits.test = j.at("test").get<std::vector<std::size_t>>();
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, "splits.json: " + std::string(e.what()));
    }
    for (auto* v : {&g.splits.train, &g.splits.val, &g.splits.test}) std::sort(v->begin(), v->end());
  } else {
    Rng rng(0);
    g.splits = stratified_split(g.labels, g.num_classes, rng);
  }
  check_splits(g);
  return g;
}

GraphCollection load_graph_jsonl(const fs::path& file) {
  std::ifstream in = open_or_throw(file);
  GraphCollection c;
  std::string line;
  std::size_t lineno = 0;
  bool dim_known = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    NodeGraph g;
    int label = 0, fold = 0;
    try {
      Json j = Json::parse(line);
      g.n = j.at("num_nodes").get<std::size_t>();
      if (g.n == 0) schema(file, lineno, "graph has no nodes");
      std::vector<std::pair<std::size_t, std::size_t>> arcs;
      for (const Json& e : j.at("edges")) {
        auto s = e.at(0).get<std::size_t>(), d = e.at(1).get<std::size_t>();
        if (s >= g.n || d >= g.n) schema(file, lineno, "edge endpoint out of range");
        arcs.emplace_back(s, d);
      }
      g.adj = adjacency_from_arcs(g.n, arcs);
      const Json& feats = j.at("node_feats");
      if (feats.size() != g.n) schema(file, lineno, "node_feats row count != num_nodes");
      const std::size_t d = feats.at(0).size();
      if (!dim_known) {
        c.feature_dim = d;
        dim_known = true;
      } else if (d != c.feature_dim) {
        schema(file, lineno, "feature dimension differs from earlier graphs");
      }
      g.features = Matrix(g.n, d);
      for (std::size_t v = 0; v < g.n; ++v) {
        if (feats[v].size() != d) schema(file, lineno, "ragged node_feats");
        for (std::size_t k = 0; k < d; ++k) g.features(v, k) = feats[v][k].get<double>();
      }
      label = j.at("label").get<int>();
      fold = j.at("fold").get<int>();
      if (label < 0 || fold < 0) schema(file, lineno, "negative label or fold");
    } catch (const Json::exception& e) {
      schema(file, lineno, e.what());
    }
    c.graphs.push_back(std::move(g));
    c.labels.push_back(label);
    c.folds.push_back(fold);
    c.num_classes = std::max(c.num_classes, label + 1);
    c.num_folds = std::max(c.num_folds, fold + 1);
  }
  if (c.graphs.empty()) throw Error(ErrorCode::SchemaViolation, file.string() + " has no graphs");
  return c;
}

InteractionTable load_ratings_tsv(const fs::path& file) {
  std::ifstream in = open_or_throw(file);
  InteractionTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_fields(line, '\t');
    Interaction x;
    if (f.size() != 4 || !parse_index(f[0], x.user) || !parse_index(f[1], x.item) ||
        !parse_double(f[2], x.rating))
      schema(file, lineno, "expected user<TAB>item<TAB>rating<TAB>split");
    if (f[3] == "train") x.split = SplitTag::Train;
    else if (f[3] == "val") x.split = SplitTag::Val;
    else if (f[3] == "test") x.split = SplitTag::Test;
    else schema(file, lineno, "unknown split '" + f[3] + "'");
    t.num_users = std::max(t.num_users, x.user + 1);
    t.num_items = std::max(t.num_items, x.item + 1);
    t.triples.push_back(x);
  }
  if (t.triples.empty()) throw Error(ErrorCode::SchemaViolation, file.string() + " is empty");
  t.index();
  return t;
}

Dataset load_dataset(const std::string& kind, const fs::path& path) {
  if (kind == "node_dir") return load_node_dir(path);
  if (kind == "graph_jsonl") return load_graph_jsonl(path);
  if (kind == "ratings_tsv") return load_ratings_tsv(path);
  throw Error(ErrorCode::InvalidConfig, "unknown dataset kind: " + kind);
}

NodeGraph generate_sbm(const SbmParams& p) {
  auto valid = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!valid(p.p_in) || !valid(p.p_out) || p.p_out > p.p_in)
    throw Error(ErrorCode::InvalidProbability, "need 0 <= p_out <= p_in <= 1");
  if (p.num_classes < 1 || p.n < static_cast<std::size_t>(p.num_classes))
    throw Error(ErrorCode::InvalidParameter, "need n >= num_classes >= 1");
  if (p.feature_dim < static_cast<std::size_t>(p.num_classes))
    throw Error(ErrorCode::InvalidParameter, "feature_dim must be >= num_classes");
  Rng rng(p.seed);
  NodeGraph g;
  g.n = p.n;
  g.num_classes = p.num_classes;
  g.labels.resize(p.n);
  for (std::size_t v = 0; v < p.n; ++v) g.labels[v] = static_cast<int>(v % p.num_classes);
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t j = i + 1; j < p.n; ++j)
      if (rng.bernoulli(g.labels[i] == g.labels[j] ? p.p_in : p.p_out)) {
        arcs.emplace_back(i, j);
        arcs.emplace_back(j, i);
      }
  g.adj = adjacency_from_arcs(p.n, arcs);
  g.features = Matrix(p.n, p.feature_dim);
  for (std::size_t v = 0; v < p.n; ++v)
    for (std::size_t k = 0; k < p.feature_dim; ++k)
      g.features(v, k) = rng.normal() + (static_cast<int>(k) == g.labels[v] ? p.feature_scale : 0.0);
  g.splits = stratified_split(g.labels, g.num_classes, rng);
  return g;
}

GraphCollection generate_graph_collection(const MotifParams& p) {
  if (p.num_graphs < 2 || p.nodes_per_graph < 4 || p.num_folds < 2 ||
      p.label_noise < 0.0 || p.label_noise > 1.0)
    throw Error(ErrorCode::InvalidParameter,
                "need num_graphs >= 2, nodes_per_graph >= 4, num_folds >= 2, noise in [0,1]");
  if (p.motif != "chord")
    throw Error(ErrorCode::InvalidParameter, "unknown motif '" + p.motif + "'");
  Rng rng(p.seed);
  GraphCollection c;
  c.num_classes = 2;
  c.num_folds = p.num_folds;
  c.feature_dim = 5;
  const std::size_t n = p.nodes_per_graph;
  for (std::size_t gi = 0; gi < p.num_graphs; ++gi) {
    const int label = static_cast<int>(gi % 2);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    auto link = [&](std::size_t a, std::size_t b) {
      arcs.emplace_back(perm[a], perm[b]);
      arcs.emplace_back(perm[b], perm[a]);
    };
    for (std::size_t i = 0; i + 1 < n; ++i) link(i, i + 1);
    if (label == 1)
      for (std::size_t i = 0; i + 2 < n; i += 2) link(i, i + 2);
    NodeGraph g;
    g.n = n;
    g.adj = adjacency_from_arcs(n, arcs);
    g.features = Matrix(n, c.feature_dim);
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t deg = g.adj.row_ptr[v + 1] - g.adj.row_ptr[v];
      g.features(v, std::min<std::size_t>(deg, 4)) = 1.0;
    }
    const bool flip = p.label_noise > 0.0 && rng.bernoulli(p.label_noise);
    c.graphs.push_back(std::move(g));
    c.labels.push_back(flip ? 1 - label : label);
    c.folds.push_back(static_cast<int>((gi / 2) % static_cast<std::size_t>(p.num_folds)));
  }
  return c;
}

InteractionTable generate_interactions(const InteractionParams& p) {
  if (p.num_users == 0 || p.num_items == 0 || p.latent_dim == 0)
    throw Error(ErrorCode::InvalidParameter, "users, items and latent_dim must be positive");
  if (!(p.density > 0.0 && p.density <= 1.0))
    throw Error(ErrorCode::InvalidParameter, "density must lie in (0, 1]");
  Rng rng(p.seed);
  Matrix uf(p.num_users, p.latent_dim), vf(p.num_items, p.latent_dim);
  for (double& x : uf.data) x = rng.normal();
  for (double& x : vf.data) x = rng.normal();
  const Matrix scores = matmul(uf, [&] {
    Matrix t(p.latent_dim, p.num_items);
    for (std::size_t i = 0; i < p.num_items; ++i)
      for (std::size_t k = 0; k < p.latent_dim; ++k) t(k, i) = vf(i, k);
    return t;
  }());
  const auto per_user = static_cast<std::size_t>(
      std::ceil(p.density * static_cast<double>(p.num_items) - 1e-9));
  InteractionTable t;
  t.num_users = p.num_users;
  t.num_items = p.num_items;
  for (std::size_t u = 0; u < p.num_users; ++u) {
    std::vector<std::size_t> items(p.num_items);
    std::iota(items.begin(), items.end(), 0);
    std::stable_sort(items.begin(), items.end(),
                     [&](std::size_t a, std::size_t b) { return scores(u, a) > scores(u, b); });
    items.resize(per_user);
    rng.shuffle(items);
    const std::size_t m = items.size();
    std::size_t n_test = 0, n_val = 0;
    if (m >= 3) {
      n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(m))));
      n_val = n_test;
    } else if (m == 2) {
      n_test = 1;
    }
    for (std::size_t k = 0; k < m; ++k) {
      SplitTag tag = k < n_test ? SplitTag::Test : k < n_test + n_val ? SplitTag::Val : SplitTag::Train;
      t.triples.push_back(Interaction{u, items[k], 1.0, tag});
    }
  }
  std::sort(t.triples.begin(), t.triples.end(), [](const Interaction& a, const Interaction& b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  });
  t.index();
  return t;
}

NodeGraph add_self_loops(NodeGraph g) {
  auto arcs = arcs_of(g);
  for (std::size_t v = 0; v < g.n; ++v) arcs.emplace_back(v, v);
  g.adj = adjacency_from_arcs(g.n, arcs);
  return g;
}

NodeGraph to_undirected(NodeGraph g) {
  auto arcs = arcs_of(g);
  const std::size_t m = arcs.size();
  for (std::size_t k = 0; k < m; ++k) arcs.emplace_back(arcs[k].second, arcs[k].first);
  g.adj = adjacency_from_arcs(g.n, arcs);
  return g;
}

// Rows are scaled to unit L1 norm, so nonnegative rows sum to 1. All-zero rows stay.
NodeGraph normalize_features(NodeGraph g) {
  for (std::size_t v = 0; v < g.features.rows; ++v) {
    double l1 = 0.0;
    for (double x : g.features.row(v)) l1 += std::fabs(x);
    if (l1 == 0.0) continue;
    for (double& x : g.features.row(v)) x /= l1;
  }
  return g;
}

Dataset apply_transform(Dataset d, const std::string& name) {
  using Fn = NodeGraph (*)(NodeGraph);
  Fn fn = nullptr;
  if (name == "AddSelfLoops") fn = add_self_loops;
  else if (name == "ToUndirected") fn = to_undirected;
  else if (name == "NormalizeFeatures") fn = normalize_features;
  else throw Error(ErrorCode::InapplicableTransform, "unknown transform " + name);

  if (auto* g = std::get_if<NodeGraph>(&d)) {
    *g = fn(std::move(*g));
  } else if (auto* c = std::get_if<GraphCollection>(&d)) {
    for (auto& g : c->graphs) g = fn(std::move(g));
  } else if (name != "ToUndirected") {
    // The user-item graph is bipartite and symmetric already; only ToUndirected
    // is meaningful there, and it is the identity.
    throw Error(ErrorCode::InapplicableTransform, name + " does not apply to interaction tables");
  }
  return d;
}

}  // namespace glagent::engine
