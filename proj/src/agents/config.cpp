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

#include "glagent/agents/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "glagent/error.hpp"

namespace glagent::agents {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) bad(where + ": unknown key '" + it.key() + "'");
}

int positive(const Json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad(std::string(key) + " must be an integer");
  const int v = j.at(key).get<int>();
  if (v < 1) bad(std::string(key) + " must be positive");
  return v;
}

}  // namespace

Json DatasetSource::to_json() const {
  Json j{{"kind", kind}};
  if (!path.empty()) j["path"] = path;
  if (!generator.empty()) {
    j["generator"] = generator;
    j["params"] = params;
  }
  return j;
}

DatasetSource DatasetSource::from_json(const Json& j) {
  if (!j.is_object()) bad("dataset must be a map");
  only_keys(j, {"kind", "path", "generator", "params"}, "dataset");
  DatasetSource d;
  d.kind = j.value("kind", std::string());
  if (d.kind != "node" && d.kind != "graph" && d.kind != "link") bad("dataset.kind must be node, graph or link");
  d.path = j.value("path", std::string());
  d.generator = j.value("generator", std::string());
  if (j.contains("params")) d.params = j.at("params");
  if (d.path.empty() == d.generator.empty()) bad("dataset needs exactly one of path or generator");
  if (!d.generator.empty()) {
    const std::string expected = d.kind == "node" ? "sbm" : d.kind == "graph" ? "motif" : "interactions";
    if (d.generator != expected) bad("a " + d.kind + " dataset is generated by '" + expected + "'");
  }
  return d;
}

Json RunConfig::to_json() const {
  Json j{{"dataset", dataset.to_json()},
         {"backend", backend},
         {"seed", seed},
         {"search_budget", search_budget},
         {"tune_budget", tune_budget},
         {"epochs", epochs},
         {"hidden_dim", hidden_dim},
         {"num_blocks", num_blocks},
         {"diff_steps", diff_steps},
         {"final_repeats", final_repeats},
         {"test_fold", test_fold},
         {"timing", clock_kind()},
         {"rate_card", rate_card.to_json()},
         {"reprompt", reprompt}};
  if (!fixture_path.empty()) j["fixture_path"] = fixture_path;
  return j;
}

RunConfig RunConfig::from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) bad("run config must be a map");
  only_keys(j, {"dataset", "backend", "fixture_path", "seed", "search_budget", "tune_budget", "epochs", "hidden_dim",
                "num_blocks", "diff_steps", "final_repeats", "test_fold", "timing", "rate_card", "reprompt"},
            "run config");
  RunConfig c;
  c.base_dir = base_dir;
  try {
    if (!j.contains("dataset")) bad("run config needs a dataset");
    c.dataset = DatasetSource::from_json(j.at("dataset"));
    c.backend = j.value("backend", c.backend);
    if (c.backend != "mock" && c.backend != "http") bad("backend must be mock or http");
    c.fixture_path = j.value("fixture_path", std::string());
    c.seed = j.value("seed", std::uint64_t{0});
    // Budgets are checked by the stages so that a zero budget surfaces as BudgetNonPositive.
    c.search_budget = j.value("search_budget", c.search_budget);
    c.tune_budget = j.value("tune_budget", c.tune_budget);
    c.epochs = positive(j, "epochs", c.epochs);
    c.hidden_dim = positive(j, "hidden_dim", c.hidden_dim);
    c.num_blocks = positive(j, "num_blocks", c.num_blocks);
    if (c.num_blocks > 4) bad("num_blocks must be at most 4");
    c.diff_steps = positive(j, "diff_steps", c.diff_steps);
    c.final_repeats = positive(j, "final_repeats", c.final_repeats);
    c.test_fold = j.value("test_fold", 0);
    if (c.test_fold < 0) bad("test_fold must be nonnegative");
    c.timing = j.value("timing", std::string());
    if (!c.timing.empty() && c.timing != "logical" && c.timing != "wall") bad("timing must be logical or wall");
    if (j.contains("rate_card")) c.rate_card = llm::RateCard::from_json(j.at("rate_card"));
    c.reprompt = j.value("reprompt", false);
  } catch (const Json::exception& e) {
    bad(std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

std::filesystem::path RunConfig::resolve(const std::string& p) const {
  std::filesystem::path fp(p);
  if (fp.is_absolute() || base_dir.empty()) return fp;
  return base_dir / fp;
}

std::string RunConfig::clock_kind() const {
  if (!timing.empty()) return timing;
  return backend == "mock" ? "logical" : "wall";
}

engine::Dataset load_config_dataset(const RunConfig& cfg) {
  const DatasetSource& s = cfg.dataset;
  if (!s.path.empty()) {
    const std::string fmt = s.kind == "node" ? "node_dir" : s.kind == "graph" ? "graph_jsonl" : "ratings_tsv";
    return engine::load_dataset(fmt, cfg.resolve(s.path));
  }
  const Json& p = s.params;
  try {
    if (s.generator == "sbm") {
      engine::SbmParams sp;
      sp.n = p.value("n", sp.n);
      sp.num_classes = p.value("num_classes", sp.num_classes);
      sp.p_in = p.value("p_in", sp.p_in);
      sp.p_out = p.value("p_out", sp.p_out);
      sp.feature_dim = p.value("feature_dim", sp.feature_dim);
      sp.feature_scale = p.value("feature_scale", sp.feature_scale);
      sp.seed = p.value("seed", sp.seed);
      return engine::generate_sbm(sp);
    }
    if (s.generator == "motif") {
      engine::MotifParams mp;
      mp.num_graphs = p.value("num_graphs", mp.num_graphs);
      mp.motif = p.value("motif", mp.motif);
      mp.nodes_per_graph = p.value("nodes_per_graph", mp.nodes_per_graph);
      mp.label_noise = p.value("label_noise", mp.label_noise);
      mp.num_folds = p.value("num_folds", mp.num_folds);
      mp.seed = p.value("seed", mp.seed);
      return engine::generate_graph_collection(mp);
    }
    engine::InteractionParams ip;
    ip.num_users = p.value("num_users", ip.num_users);
    ip.num_items = p.value("num_items", ip.num_items);
    ip.density = p.value("density", ip.density);
    ip.latent_dim = p.value("latent_dim", ip.latent_dim);
    ip.seed = p.value("seed", ip.seed);
    return engine::generate_interactions(ip);
  } catch (const Json::exception& e) {
    bad(std::string("dataset params: ") + e.what());
  }
}

}  // namespace glagent::agents
