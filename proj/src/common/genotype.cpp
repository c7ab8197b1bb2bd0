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

#include "glagent/genotype.hpp"

#include <algorithm>
#include <cstdio>

#include "glagent/error.hpp"
#include "glagent/rng.hpp"

namespace glagent {

const char* to_string(Instance instance) noexcept {
  switch (instance) {
    case Instance::NodeF2gnn: return "node_f2gnn";
    case Instance::GraphLrgnn: return "graph_lrgnn";
    case Instance::LinkProfcf: return "link_profcf";
  }
  return "?";
}

Instance instance_from_string(const std::string& name) {
  if (name == "node_f2gnn") return Instance::NodeF2gnn;
  if (name == "graph_lrgnn") return Instance::GraphLrgnn;
  if (name == "link_profcf") return Instance::LinkProfcf;
  throw Error(ErrorCode::InvalidEnumValue, "instance: " + name);
}

const char* to_string(TaskLevel level) noexcept {
  switch (level) {
    case TaskLevel::Node: return "node";
    case TaskLevel::Graph: return "graph";
    case TaskLevel::Link: return "link";
  }
  return "?";
}

TaskLevel level_from_string(const std::string& name) {
  if (name == "node") return TaskLevel::Node;
  if (name == "graph") return TaskLevel::Graph;
  if (name == "link") return TaskLevel::Link;
  throw Error(ErrorCode::InvalidEnumValue, "task level: " + name);
}

TaskLevel level_of(Instance instance) noexcept {
  switch (instance) {
    case Instance::NodeF2gnn: return TaskLevel::Node;
    case Instance::GraphLrgnn: return TaskLevel::Graph;
    case Instance::LinkProfcf: return TaskLevel::Link;
  }
  return TaskLevel::Node;
}

std::string Genotype::to_string() const {
  std::string out;
  if (instance == Instance::LinkProfcf) {
    out = "message=" + link.message + "; aggregation=" + link.aggregation +
          "; layers=" + std::to_string(link.num_layers) + "; layer_comb=" + link.layer_comb +
          "; components=" + std::to_string(link.num_components) +
          "; comp_comb=" + link.comp_comb + "; interaction=" + link.interaction;
    return out;
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) out += "; ";
    out += "b" + std::to_string(i + 1) + "=" + blocks[i].agg + "[";
    for (std::size_t k = 0; k < blocks[i].inputs.size(); ++k) {
      if (k) out += ",";
      out += std::to_string(blocks[i].inputs[k]);
    }
    out += "]+" + blocks[i].fuse;
  }
  if (instance == Instance::GraphLrgnn) out += "; readout=" + readout;
  return out;
}

Json Genotype::to_json() const {
  Json j;
  j["instance"] = glagent::to_string(instance);
  if (instance == Instance::LinkProfcf) {
    j["link"] = {{"message", link.message},         {"aggregation", link.aggregation},
                 {"num_layers", link.num_layers},   {"layer_comb", link.layer_comb},
                 {"num_components", link.num_components},
                 {"comp_comb", link.comp_comb},     {"interaction", link.interaction}};
    return j;
  }
  Json blocks_json = Json::array();
  for (const auto& b : blocks)
    blocks_json.push_back({{"agg", b.agg}, {"inputs", b.inputs}, {"fuse", b.fuse}});
  j["blocks"] = std::move(blocks_json);
  if (instance == Instance::GraphLrgnn) j["readout"] = readout;
  return j;
}

Genotype Genotype::from_json(const Json& j) {
  try {
    Genotype g;
    g.instance = instance_from_string(j.at("instance").get<std::string>());
    if (g.instance == Instance::LinkProfcf) {
      const Json& l = j.at("link");
      g.link.message = l.at("message").get<std::string>();
      g.link.aggregation = l.at("aggregation").get<std::string>();
      g.link.num_layers = l.at("num_layers").get<int>();
      g.link.layer_comb = l.at("layer_comb").get<std::string>();
      g.link.num_components = l.at("num_components").get<int>();
      g.link.comp_comb = l.at("comp_comb").get<std::string>();
      g.link.interaction = l.at("interaction").get<std::string>();
      return g;
    }
    for (const Json& b : j.at("blocks"))
      g.blocks.push_back(BlockGene{b.at("agg").get<std::string>(),
                                   b.at("inputs").get<std::vector<int>>(),
                                   b.at("fuse").get<std::string>()});
    if (g.instance == Instance::GraphLrgnn) g.readout = j.at("readout").get<std::string>();
    return g;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidGenotype, std::string("genotype json: ") + e.what());
  }
}

Json HpTable::to_json() const {
  return Json{{"learning_rate", {learning_rate.lo, learning_rate.hi}},
              {"weight_decay", {weight_decay.lo, weight_decay.hi}},
              {"dropout", {dropout.lo, dropout.hi}},
              {"activation", activation},
              {"epochs", epochs},
              {"hidden_dim", hidden_dim}};
}

HpTable HpTable::from_json(const Json& j) {
  auto range = [&](const char* key) {
    const Json& r = j.at(key);
    if (!r.is_array() || r.size() != 2)
      throw Error(ErrorCode::SchemaViolation, std::string("hp_table.") + key + " must be [lo, hi]");
    return HpRange{r[0].get<double>(), r[1].get<double>()};
  };
  HpTable t;
  t.learning_rate = range("learning_rate");
  t.weight_decay = range("weight_decay");
  t.dropout = range("dropout");
  t.activation = j.at("activation").get<std::vector<std::string>>();
  t.epochs = j.value("epochs", 100);
  t.hidden_dim = j.value("hidden_dim", 16);
  return t;
}

HpTable HpTable::defaults_for(Instance instance) {
  HpTable t;
  t.dropout = {0.0, 0.5};
  switch (instance) {
    case Instance::NodeF2gnn:
      t.learning_rate = {0.001, 0.005};
      t.weight_decay = {0.0001, 0.0005};
      t.activation = {"relu"};
      break;
    case Instance::GraphLrgnn:
      t.learning_rate = {0.01, 0.05};
      t.weight_decay = {0.001, 0.005};
      t.activation = {"relu"};
      break;
    case Instance::LinkProfcf:
      t.learning_rate = {0.01, 0.05};
      t.weight_decay = {0.001, 0.005};
      t.activation = {"relu", "identity"};
      break;
  }
  return t;
}

const std::vector<std::string>& SearchSpace::ops(const std::string& module) const {
  for (const auto& [name, list] : candidates)
    if (name == module) return list;
  throw Error(ErrorCode::UnknownModule, "space has no candidates for module " + module);
}

bool SearchSpace::has_module(const std::string& module) const {
  for (const auto& [name, list] : candidates)
    if (name == module) return true;
  return false;
}

Json SearchSpace::to_json() const {
  Json cand = Json::array();
  for (const auto& [name, list] : candidates) cand.push_back({{"module", name}, {"ops", list}});
  Json topo;
  if (instance == Instance::LinkProfcf) {
    topo["layer_counts"] = layer_counts;
    topo["component_counts"] = component_counts;
  } else {
    topo["num_blocks"] = num_blocks;
  }
  return Json{{"instance", glagent::to_string(instance)},
              {"modules", modules},
              {"candidates", std::move(cand)},
              {"topology", std::move(topo)},
              {"hp_table", hp_table.to_json()}};
}

SearchSpace SearchSpace::from_json(const Json& j) {
  try {
    SearchSpace s;
    s.instance = instance_from_string(j.at("instance").get<std::string>());
    if (j.contains("modules")) s.modules = j.at("modules").get<std::vector<std::string>>();
    for (const Json& c : j.at("candidates")) {
      auto ops = c.at("ops").get<std::vector<std::string>>();
      if (ops.empty())
        throw Error(ErrorCode::SchemaViolation,
                    "empty candidate list for " + c.at("module").get<std::string>());
      s.candidates.emplace_back(c.at("module").get<std::string>(), std::move(ops));
    }
    const Json& topo = j.at("topology");
    if (s.instance == Instance::LinkProfcf) {
      s.layer_counts = topo.at("layer_counts").get<std::vector<int>>();
      s.component_counts = topo.at("component_counts").get<std::vector<int>>();
      if (s.layer_counts.empty() || s.component_counts.empty())
        throw Error(ErrorCode::SchemaViolation, "link topology lists must be non-empty");
      for (int v : s.layer_counts)
        if (v < 1) throw Error(ErrorCode::SchemaViolation, "layer count must be positive");
      for (int v : s.component_counts)
        if (v < 1) throw Error(ErrorCode::SchemaViolation, "component count must be positive");
    } else {
      s.num_blocks = topo.at("num_blocks").get<int>();
      if (s.num_blocks < 1 || s.num_blocks > 4)
        throw Error(ErrorCode::SchemaViolation, "num_blocks must be in [1, 4]");
    }
    s.hp_table = j.contains("hp_table") ? HpTable::from_json(j.at("hp_table"))
                                        : HpTable::defaults_for(s.instance);
    if (s.modules.empty())
      for (const auto& [name, list] : s.candidates) s.modules.push_back(name);
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("space file: ") + e.what());
  }
}

std::string SearchSpace::serialize() const { return to_json().dump(2); }

std::string SearchSpace::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize())));
  return buf;
}

SearchSpace SearchSpace::default_for(Instance instance) {
  using namespace modules;
  SearchSpace s;
  s.instance = instance;
  s.hp_table = HpTable::defaults_for(instance);
  switch (instance) {
    case Instance::NodeF2gnn:
      s.modules = {kAggregation, kSelection, kFusion};
      s.candidates = {{kAggregation, {"GCN", "SAGE"}},
                      {kSelection, {"ZERO", "IDENTITY"}},
                      {kFusion, {"sum", "mean"}}};
      break;
    case Instance::GraphLrgnn:
      s.modules = {kAggregation, kPooling, kReadout, kSelection, kFusion};
      s.candidates = {{kAggregation, {"GCN", "SAGE"}},
                      {kReadout, {"global_sum", "global_mean"}},
                      {kSelection, {"ZERO", "IDENTITY"}},
                      {kFusion, {"sum", "mean"}}};
      break;
    case Instance::LinkProfcf:
      s.modules = {kMessage, kAggregation, kLayerNumber, kLayerComb,
                   kComponentNumber, kComponentComb, kInteraction};
      s.candidates = {{kMessage, {"IDENTITY", "HADAMARD"}},
                      {kAggregation, {"NONE", "GCN", "SAGE"}},
                      {kLayerComb, {"STACK", "SUM"}},
                      {kComponentComb, {"MEAN"}},
                      {kInteraction, {"DOT", "CONCAT_MLP"}}};
      s.layer_counts = {1, 3};
      s.component_counts = {1, 2};
      break;
  }
  return s;
}

namespace {

bool contains(const std::vector<std::string>& list, const std::string& v) {
  return std::find(list.begin(), list.end(), v) != list.end();
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidGenotype, what); }

}  // namespace

void validate_genotype(const Genotype& g, const SearchSpace& space) {
  using namespace modules;
  if (g.instance != space.instance)
    bad(std::string("genotype instance ") + to_string(g.instance) + " vs space " +
        to_string(space.instance));
  if (g.instance == Instance::LinkProfcf) {
    const LinkGene& l = g.link;
    auto check = [&](const char* module, const std::string& op) {
      if (!contains(space.ops(module), op)) bad(std::string(module) + " op not in space: " + op);
    };
    check(kMessage, l.message);
    check(kAggregation, l.aggregation);
    check(kLayerComb, l.layer_comb);
    check(kComponentComb, l.comp_comb);
    check(kInteraction, l.interaction);
    if (std::find(space.layer_counts.begin(), space.layer_counts.end(), l.num_layers) ==
        space.layer_counts.end())
      bad("layer count not in space: " + std::to_string(l.num_layers));
    if (std::find(space.component_counts.begin(), space.component_counts.end(),
                  l.num_components) == space.component_counts.end())
      bad("component count not in space: " + std::to_string(l.num_components));
    return;
  }
  if (static_cast<int>(g.blocks.size()) != space.num_blocks)
    bad("expected " + std::to_string(space.num_blocks) + " blocks, got " +
        std::to_string(g.blocks.size()));
  const auto& aggs = space.ops(kAggregation);
  const auto& sel = space.ops(kSelection);
  const auto& fuses = space.ops(kFusion);
  if (!contains(sel, "IDENTITY")) bad("Selection candidates lack IDENTITY");
  const bool zero_allowed = contains(sel, "ZERO");
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    const BlockGene& b = g.blocks[i];
    const std::string where = "block " + std::to_string(i + 1) + ": ";
    if (!contains(aggs, b.agg)) bad(where + "aggregation not in space: " + b.agg);
    if (b.inputs.empty()) bad(where + "no IDENTITY gate");
    for (std::size_t k = 0; k < b.inputs.size(); ++k) {
      if (b.inputs[k] < 0 || b.inputs[k] > static_cast<int>(i)) bad(where + "input out of range");
      if (k && b.inputs[k] <= b.inputs[k - 1]) bad(where + "inputs not sorted/unique");
    }
    if (!zero_allowed && b.inputs.size() != i + 1) bad(where + "ZERO gate not in space");
    if (b.inputs.size() == 1) {
      if (b.fuse != "sum") bad(where + "single-input block must carry fusion sum");
    } else if (!contains(fuses, b.fuse)) {
      bad(where + "fusion not in space: " + b.fuse);
    }
  }
  if (g.instance == Instance::GraphLrgnn) {
    if (!contains(space.ops(kReadout), g.readout)) bad("readout not in space: " + g.readout);
  } else if (!g.readout.empty()) {
    bad("node genotype carries a readout");
  }
}

}  // namespace glagent
