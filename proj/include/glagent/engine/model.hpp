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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glagent/engine/dataset.hpp"
#include "glagent/engine/tape.hpp"
#include "glagent/genotype.hpp"
#include "glagent/json.hpp"

namespace glagent {
class Rng;
}

namespace glagent::engine {

struct HyperParams {
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  double dropout = 0.0;
  std::string activation = "relu";  // relu | identity
  int epochs = 100;
  int hidden_dim = 16;

  // Throws InvalidParameter when a field is out of range.
  void validate() const;
  Json to_json() const;
  static HyperParams from_json(const Json& j);
  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

struct Dims {
  std::size_t in_dim = 0;
  std::size_t hidden = 16;
  std::size_t num_classes = 0;
  std::size_t num_users = 0;
  std::size_t num_items = 0;
};

Dims dims_for(const Dataset& d, std::size_t hidden);

// Named parameter tensors. Each tensor is initialized from its own stream
// (seed mixed with the name hash), so initial values do not depend on which
// other parameters exist.
class ParamStore {
 public:
  enum class Init { Uniform, Zero };

  // Uniform init draws from [-1/sqrt(fan_in), 1/sqrt(fan_in)]; fan_in = rows.
  void add(const std::string& name, std::size_t rows, std::size_t cols, Init init, std::uint64_t seed);
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  std::size_t index(const std::string& name) const;
  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Matrix& value(std::size_t i) { return values_[i]; }
  const Matrix& value(std::size_t i) const { return values_[i]; }
  const Matrix& value(const std::string& name) const { return values_[index(name)]; }
  std::size_t scalar_count() const;
  bool all_finite() const;

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
  std::map<std::string, std::size_t> index_;
};

// Puts parameters on a tape on first use and remembers the mapping so that
// gradients can be read back after backward().
class Binder {
 public:
  Binder(Tape& tape, const ParamStore& store) : tape_(tape), store_(store), vars_(store.size()) {}
  Var operator()(const std::string& name);
  Tape& tape() { return tape_; }
  // Gradient per store index; an empty matrix for parameters never touched.
  std::vector<Matrix> gradients() const;

 private:
  Tape& tape_;
  const ParamStore& store_;
  std::vector<std::optional<Var>> vars_;
};

// Sparse operators and inputs derived once per dataset.
struct GraphContext {
  std::size_t num_rows = 0;
  Matrix features;
  SparseOperatorPtr gcn;   // D^-1/2 (A + I) D^-1/2, self-loops added where missing
  SparseOperatorPtr mean;  // row-normalized A
  SparseOperatorPtr sum;   // A
  std::vector<std::size_t> graph_offsets;  // graph collections: G + 1 row offsets
  std::size_t num_users = 0;
  std::size_t num_items = 0;
};

// For interaction tables the operators act on the bipartite user+item graph
// built from training interactions; gcn there is D^-1/2 A D^-1/2.
GraphContext make_context(const Dataset& d);

SparseMatrix gcn_normalized(const SparseMatrix& adj, bool add_missing_self_loops);
SparseMatrix row_normalized(const SparseMatrix& adj);

struct ModelState {
  Genotype genotype;
  Dims dims;
  ParamStore params;
  std::string activation = "relu";
  std::uint64_t seed = 0;
};

// Aggregation ops the engine implements.
bool engine_implements(const std::string& op);

ModelState build_model(const Genotype& genotype, const Dims& dims, std::uint64_t seed);

struct ForwardOptions {
  bool training = false;
  double dropout = 0.0;
  std::string activation = "relu";
};

// Layer helpers shared with the relaxed supernet.
void declare_aggregation(ParamStore& store, const std::string& prefix, const std::string& op,
                         std::size_t in, std::size_t out, std::uint64_t seed);
Var aggregate(Binder& p, const std::string& prefix, const std::string& op, Var x,
              const GraphContext& ctx);
Var activate(Tape& t, Var x, const std::string& activation);
Var readout(Tape& t, Var h, const std::string& op, const GraphContext& ctx);
Var linear(Binder& p, const std::string& prefix, Var x);  // x * W + b

// Node: n x classes logits. Graph: G x classes logits. Link: (users + items) x hidden.
Var forward(Binder& p, const ModelState& m, const GraphContext& ctx, const ForwardOptions& o, Rng& rng);

// Link scores for (user, item) pairs given the tower output.
Var link_scores(Binder& p, const ModelState& m, Var rep, std::span<const std::size_t> users,
                std::span<const std::size_t> items);
// users x items score matrix, computed without a tape.
Matrix all_link_scores(const ModelState& m, const GraphContext& ctx);

}  // namespace glagent::engine
