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
#include <string>
#include <utility>
#include <vector>

#include "glagent/json.hpp"

namespace glagent {

enum class Instance { NodeF2gnn, GraphLrgnn, LinkProfcf };

const char* to_string(Instance instance) noexcept;
Instance instance_from_string(const std::string& name);

enum class TaskLevel { Node, Graph, Link };

const char* to_string(TaskLevel level) noexcept;
TaskLevel level_from_string(const std::string& name);
TaskLevel level_of(Instance instance) noexcept;

// Module names shared by the catalog, the search space and the agents.
namespace modules {
inline constexpr const char* kAggregation = "Aggregation";
inline constexpr const char* kSelection = "Selection";
inline constexpr const char* kFusion = "Fusion";
inline constexpr const char* kReadout = "Readout";
inline constexpr const char* kPooling = "Pooling";
inline constexpr const char* kMessage = "Message function";
inline constexpr const char* kLayerNumber = "Layer number";
inline constexpr const char* kLayerComb = "Layer combination";
inline constexpr const char* kComponentNumber = "Component number";
inline constexpr const char* kComponentComb = "Component combination";
inline constexpr const char* kInteraction = "Interaction function";
}  // namespace modules

// One block of the node/graph backbone. inputs index the available
// representations: 0 is the preprocessed h0, k >= 1 is block k's output.
struct BlockGene {
  std::string agg;
  std::vector<int> inputs;  // sorted, unique, nonempty
  std::string fuse;         // "sum" whenever inputs has one element

  friend bool operator==(const BlockGene&, const BlockGene&) = default;
};

struct LinkGene {
  std::string message;
  std::string aggregation;
  int num_layers = 1;
  std::string layer_comb;
  int num_components = 1;
  std::string comp_comb;
  std::string interaction;

  friend bool operator==(const LinkGene&, const LinkGene&) = default;
};

struct Genotype {
  Instance instance = Instance::NodeF2gnn;
  std::vector<BlockGene> blocks;  // node and graph
  std::string readout;            // graph only
  LinkGene link;                  // link only

  std::string to_string() const;
  Json to_json() const;
  static Genotype from_json(const Json& j);

  friend bool operator==(const Genotype&, const Genotype&) = default;
};

struct HpRange {
  double lo = 0.0;
  double hi = 0.0;
  double midpoint() const { return 0.5 * (lo + hi); }
  friend bool operator==(const HpRange&, const HpRange&) = default;
};

// Hyperparameter table attached to a space. Ranges follow the instance
// tables; epochs and hidden_dim are fixed knobs.
struct HpTable {
  HpRange learning_rate;
  HpRange weight_decay;
  HpRange dropout;
  std::vector<std::string> activation;
  int epochs = 100;
  int hidden_dim = 16;

  Json to_json() const;
  static HpTable from_json(const Json& j);
  static HpTable defaults_for(Instance instance);
  friend bool operator==(const HpTable&, const HpTable&) = default;
};

struct SearchSpace {
  Instance instance = Instance::NodeF2gnn;
  // Modules chosen for this space, in selection order. Modules that carry no
  // decision site (e.g. Pooling) are listed here but have no candidate list.
  std::vector<std::string> modules;
  // Decision-site candidates, module -> ordered op names.
  std::vector<std::pair<std::string, std::vector<std::string>>> candidates;
  int num_blocks = 2;                  // node / graph
  std::vector<int> layer_counts;       // link
  std::vector<int> component_counts;   // link
  HpTable hp_table;

  const std::vector<std::string>& ops(const std::string& module) const;
  bool has_module(const std::string& module) const;

  Json to_json() const;
  static SearchSpace from_json(const Json& j);
  // Stable text of to_json(); what lands in the space file.
  std::string serialize() const;
  // FNV-1a of serialize(), as 16 hex digits.
  std::string digest() const;

  // Default spaces built from the instance tables.
  static SearchSpace default_for(Instance instance);
};

// Throws InvalidGenotype when g does not belong to the space.
void validate_genotype(const Genotype& g, const SearchSpace& space);

}  // namespace glagent
