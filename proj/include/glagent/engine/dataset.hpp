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
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "glagent/engine/matrix.hpp"

namespace glagent::engine {

struct Splits {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// Adjacency is stored by destination: row v lists every u with an arc u -> v,
// so aggregation at v reads row v. Columns are ascending and unique.
struct NodeGraph {
  std::size_t n = 0;
  SparseMatrix adj;
  Matrix features;
  std::vector<int> labels;  // empty for graphs inside a collection
  int num_classes = 0;
  Splits splits;

  std::size_t num_arcs() const { return adj.nnz(); }
  bool has_arc(std::size_t src, std::size_t dst) const;
};

struct GraphCollection {
  std::vector<NodeGraph> graphs;
  std::vector<int> labels;
  std::vector<int> folds;
  int num_folds = 0;
  int num_classes = 0;
  std::size_t feature_dim = 0;
};

enum class SplitTag { Train, Val, Test };

struct Interaction {
  std::size_t user = 0;
  std::size_t item = 0;
  double rating = 1.0;
  SplitTag split = SplitTag::Train;
};

struct InteractionTable {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::vector<Interaction> triples;
  // Per-user sorted item lists, derived from triples.
  std::vector<std::vector<std::size_t>> train_items;
  std::vector<std::vector<std::size_t>> val_items;
  std::vector<std::vector<std::size_t>> test_items;

  // Rebuilds the per-user lists from triples; checks bounds and duplicates.
  void index();
};

using Dataset = std::variant<NodeGraph, GraphCollection, InteractionTable>;

const char* dataset_kind(const Dataset& d) noexcept;

// Builds a destination-major adjacency from arcs (src, dst); duplicates collapse.
SparseMatrix adjacency_from_arcs(std::size_t n,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& arcs);

// File loaders. kind is one of "node_dir", "graph_jsonl", "ratings_tsv".
NodeGraph load_node_dir(const std::filesystem::path& dir);
GraphCollection load_graph_jsonl(const std::filesystem::path& file);
InteractionTable load_ratings_tsv(const std::filesystem::path& file);
Dataset load_dataset(const std::string& kind, const std::filesystem::path& path);

struct SbmParams {
  std::size_t n = 200;
  int num_classes = 2;
  double p_in = 0.1;
  double p_out = 0.01;
  std::size_t feature_dim = 8;
  double feature_scale = 1.0;
  std::uint64_t seed = 0;
};

// Planted partition graph, undirected, no self-loops. Node v has label
// v % num_classes and features feature_scale * e_label + N(0, I).
NodeGraph generate_sbm(const SbmParams& p);

struct MotifParams {
  std::size_t num_graphs = 40;
  std::string motif = "chord";  // the only planted motif
  std::size_t nodes_per_graph = 10;
  double label_noise = 0.0;
  int num_folds = 2;
  std::uint64_t seed = 0;
};

// Class 0 graphs are paths; class 1 graphs are paths plus (i, i+2) chords for
// even i. Node ids are shuffled per graph; features are one-hot degree (capped at 4).
GraphCollection generate_graph_collection(const MotifParams& p);

struct InteractionParams {
  std::size_t num_users = 30;
  std::size_t num_items = 40;
  double density = 0.2;
  std::size_t latent_dim = 4;
  std::uint64_t seed = 0;
};

// Each user interacts with the top ceil(density * items) items under a planted
// latent score; per-user 80/10/10 train/val/test split.
InteractionTable generate_interactions(const InteractionParams& p);

// AddSelfLoops, ToUndirected, NormalizeFeatures.
Dataset apply_transform(Dataset d, const std::string& name);
NodeGraph add_self_loops(NodeGraph g);
NodeGraph to_undirected(NodeGraph g);
NodeGraph normalize_features(NodeGraph g);

}  // namespace glagent::engine
