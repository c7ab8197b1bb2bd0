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

#include "glagent/agents/bench.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "glagent/agents/agents.hpp"
#include "glagent/error.hpp"

namespace glagent::agents {

namespace {

std::vector<std::string> string_list(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaViolation, what + " must be a list");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw Error(ErrorCode::SchemaViolation, what + " entries must be strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

engine::Dataset bench_dataset(TaskLevel level, const BenchOptions& opts) {
  switch (level) {
    case TaskLevel::Node: {
      engine::SbmParams p;
      p.n = 60;
      p.num_classes = 3;
      p.p_in = 0.2;
      p.p_out = 0.02;
      p.feature_dim = 8;
      p.feature_scale = 3.0;
      p.seed = opts.seed;
      return engine::generate_sbm(p);
    }
    case TaskLevel::Graph: {
      engine::MotifParams p;
      p.num_graphs = 16;
      p.nodes_per_graph = 8;
      p.seed = opts.seed;
      return engine::generate_graph_collection(p);
    }
    case TaskLevel::Link: {
      engine::InteractionParams p;
      p.num_users = 12;
      p.num_items = 16;
      p.density = 0.25;
      p.seed = opts.seed;
      return engine::generate_interactions(p);
    }
  }
  throw Error(ErrorCode::InvalidParameter, "unknown task level");
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string plan_line(const TaskPlan& p) {
  return p.data_name + " | " + to_string(p.task_level) + " | " + to_string(p.task_type) + " | " + p.metric.to_string() +
         " | " + p.preference.value_or("none");
}

struct ItemRun {
  const Instruction& instruction;
  const GoldItem& gold;
  AgentContext& ctx;
  const BenchOptions& opts;
  ItemResult& out;

  void score(const std::string& agent, bool ok, Json diff) {
    out.scores[agent] = ok ? 1.0 : 0.0;
    if (!ok || !diff.is_null()) out.diffs[agent] = std::move(diff);
  }

  void failed(const std::string& agent, const Error& e) {
    score(agent, false, Json{{"error", to_string(e.code())}, {"detail", e.detail()}});
  }

  void manager() {
    try {
      const TaskPlan plan = extract_task_plan(ctx, instruction);
      const int n = plan.matching_fields(gold.task_plan);
      Json diff = nullptr;
      if (n != 5) diff = Json{{"fields_matched", n}, {"got", plan_line(plan)}, {"gold", plan_line(gold.task_plan)}};
      score("manager", n == 5, diff);
    } catch (const Error& e) {
      failed("manager", e);
    }
  }

  void data() {
    try {
      const auto chosen = select_feature_engineering(ctx, gold.task_plan, instruction);
      const bool ok = std::find(chosen.begin(), chosen.end(), gold.transform) != chosen.end();
      score("data", ok, ok ? Json(nullptr) : Json{{"selected", chosen}, {"gold", gold.transform}});
    } catch (const Error& e) {
      failed("data", e);
    }
  }

  void configuration(Instance instance) {
    try {
      const auto modules = select_modules(ctx, gold.task_plan, instance);
      const std::set<std::string> got(modules.begin(), modules.end());
      const std::set<std::string> want(gold.modules.begin(), gold.modules.end());
      SpaceOptions so;
      so.epochs = opts.epochs;
      so.hidden_dim = opts.hidden_dim;
      const SearchSpace space = build_search_space(ctx.catalog, gold.task_plan, instance, modules, so);
      const AlgorithmChoice choice = select_algorithm(ctx, space, instruction, gold.task_plan);
      const bool ok = got == want && gold.algorithm == to_string(choice.algorithm);
      Json diff = nullptr;
      if (!ok)
        diff = Json{{"modules", modules},
                    {"gold_modules", gold.modules},
                    {"algorithm", to_string(choice.algorithm)},
                    {"gold_algorithm", gold.algorithm}};
      score("configuration", ok, diff);
    } catch (const Error& e) {
      failed("configuration", e);
    }
  }

  // Searching and tuning run on the gold space so their scores only reflect
  // the log-consistency rules.
  void search_and_tune(Instance instance) {
    std::optional<Genotype> genotype;
    SearchSpace space;
    engine::Dataset d;
    try {
      SpaceOptions so;
      so.epochs = opts.epochs;
      so.hidden_dim = opts.hidden_dim;
      space = build_search_space(ctx.catalog, gold.task_plan, instance, gold.modules, so);
      d = bench_dataset(gold.task_plan.task_level, opts);
      const auto transforms = ctx.catalog.lookup_transforms(gold.task_plan.task_level);
      if (std::any_of(transforms.begin(), transforms.end(), [&](const auto& t) { return t.name == gold.transform; }))
        d = engine::apply_transform(std::move(d), gold.transform);

      SearchStageOptions so2;
      so2.budget = opts.search_budget;
      so2.diff_steps = opts.diff_steps;
      so2.seed = opts.seed;
      const Algorithm algo = algorithm_from_string(gold.algorithm);
      const search::SearchLog log = run_search_stage(ctx, space, algo, d, so2);
      const Genotype g = extract_searched_model(ctx, log);

      bool valid = true;
      std::string why;
      try {
        validate_genotype(g, space);
      } catch (const Error& e) {
        valid = false;
        why = e.detail();
      }
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& t : log.trials)
        if (!t.failed) best = std::max(best, t.val_metric);
      const auto hit = std::find_if(log.trials.begin(), log.trials.end(), [&](const search::TrialRecord& t) {
        return !t.failed && t.val_metric == best && t.genotype == g;
      });
      const bool argmax_ok = hit != log.trials.end();
      const bool ok = valid && argmax_ok;
      Json diff = nullptr;
      if (!ok) diff = Json{{"genotype_in_space", valid}, {"argmax_consistent", argmax_ok}, {"detail", why}};
      score("searching", ok, diff);
      genotype = g;
    } catch (const Error& e) {
      failed("searching", e);
    }

    if (!genotype) {
      score("tuning", false, Json{{"error", "no searched genotype"}});
      return;
    }
    try {
      TuneStageOptions to;
      to.budget = opts.tune_budget;
      to.seed = opts.seed;
      to.final_repeats = 1;
      const TuningResult r = run_tuning_stage(ctx, *genotype, space, d, to);
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& t : r.log.trials)
        if (!t.failed) best = std::max(best, t.val_metric);
      const bool consistent = std::any_of(r.log.trials.begin(), r.log.trials.end(), [&](const hpo::TuneTrial& t) {
        return !t.failed && t.val_metric == best && t.hyperparams.to_json() == r.best.to_json();
      });
      const Json hp = r.best.to_json();
      std::vector<std::string> missing;
      for (const auto& k : gold.hyperparam_keys)
        if (!hp.contains(k)) missing.push_back(k);
      const bool ok = consistent && missing.empty();
      Json diff = nullptr;
      if (!ok) diff = Json{{"best_trial_consistent", consistent}, {"missing_keys", missing}};
      score("tuning", ok, diff);
    } catch (const Error& e) {
      failed("tuning", e);
    }
  }
};

}  // namespace

std::map<std::string, GoldItem> parse_gold(const Json& j) {
  if (!j.is_object() || !j.contains("items") || !j.at("items").is_object())
    throw Error(ErrorCode::SchemaViolation, "gold document needs an \"items\" object");
  static const std::set<std::string> known = {"provenance", "task_plan", "transform", "modules", "algorithm",
                                              "hyperparam_keys"};
  std::map<std::string, GoldItem> out;
  for (auto it = j.at("items").begin(); it != j.at("items").end(); ++it) {
    const std::string id = it.key();
    const Json& v = it.value();
    try {
      if (!v.is_object()) throw Error(ErrorCode::SchemaViolation, "entry must be an object");
      for (auto f = v.begin(); f != v.end(); ++f)
        if (!known.count(f.key())) throw Error(ErrorCode::SchemaViolation, "unknown field '" + f.key() + "'");
      for (const auto& f : known)
        if (!v.contains(f)) throw Error(ErrorCode::SchemaViolation, "missing field '" + f + "'");
      GoldItem g;
      g.provenance = v.at("provenance").get<std::string>();
      if (g.provenance != "paper" && g.provenance != "fixture")
        throw Error(ErrorCode::SchemaViolation, "provenance must be paper or fixture");
      g.task_plan = task_plan_from_fields(v.at("task_plan"));
      g.transform = v.at("transform").get<std::string>();
      g.modules = string_list(v.at("modules"), "modules");
      g.algorithm = v.at("algorithm").get<std::string>();
      if (g.algorithm != "random" && g.algorithm != "differentiable")
        throw Error(ErrorCode::SchemaViolation, "algorithm must be random or differentiable");
      g.hyperparam_keys = string_list(v.at("hyperparam_keys"), "hyperparam_keys");
      out.emplace(id, std::move(g));
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaViolation, "gold item '" + id + "': " + e.detail());
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, "gold item '" + id + "': " + e.what());
    }
  }
  return out;
}

RobustnessReport bench_robustness(const std::vector<Instruction>& corpus, const std::map<std::string, GoldItem>& gold,
                                  std::shared_ptr<llm::Backend> backend, const BenchOptions& opts) {
  std::set<std::string> ids;
  for (const auto& ins : corpus) {
    if (!ins.corpus_id) throw Error(ErrorCode::SchemaViolation, "corpus item without an #id header");
    if (!ids.insert(*ins.corpus_id).second)
      throw Error(ErrorCode::SchemaViolation, "duplicate corpus id '" + *ins.corpus_id + "'");
  }
  for (const auto& [id, g] : gold)
    if (!ids.count(id)) throw Error(ErrorCode::SchemaViolation, "gold names '" + id + "', which the corpus lacks");

  RobustnessReport report;
  std::map<std::string, std::map<std::string, std::vector<double>>> by_variant;
  std::map<std::string, std::vector<double>> by_agent;
  for (const auto& ins : corpus) {
    ItemResult item;
    item.id = *ins.corpus_id;
    item.variant = ins.variant;
    auto g = gold.find(item.id);
    if (g == gold.end() || (opts.paper_only && g->second.provenance != "paper")) {
      ++report.unlabeled;
      report.items.push_back(std::move(item));
      continue;
    }
    LogicalClock clock;
    memory::MemoryStore mem("bench-" + item.id, &clock);
    llm::LlmClient client(backend, opts.rate_card, &clock);
    AgentContext ctx{client, mem, catalog::Catalog::builtin(), &clock, false};
    ItemRun run{ins, g->second, ctx, opts, item};
    run.manager();
    run.data();
    try {
      const Instance inst = instance_for(g->second.task_plan);
      run.configuration(inst);
      run.search_and_tune(inst);
    } catch (const Error& e) {
      for (const char* a : {"configuration", "searching", "tuning"}) run.failed(a, e);
    }
    item.scored = true;
    ++report.scored;
    for (const auto& [agent, s] : item.scores) {
      by_variant[to_string(item.variant)][agent].push_back(s);
      by_agent[agent].push_back(s);
    }
    report.items.push_back(std::move(item));
  }
  for (const auto& [variant, agents] : by_variant)
    for (const auto& [agent, v] : agents) report.per_variant[variant][agent] = mean(v);
  for (const auto& [agent, v] : by_agent) report.per_agent[agent] = mean(v);
  return report;
}

Json RobustnessReport::to_json() const {
  Json items_j = Json::array();
  for (const auto& it : items) {
    Json j{{"id", it.id}, {"variant", to_string(it.variant)}, {"status", it.scored ? "scored" : "unlabeled"}};
    if (it.scored) {
      j["scores"] = it.scores;
      j["diffs"] = it.diffs;
    }
    items_j.push_back(std::move(j));
  }
  return Json{{"items", items_j},
              {"item_count", items.size()},
              {"scored", scored},
              {"unlabeled", unlabeled},
              {"per_agent", per_agent},
              {"per_variant", per_variant}};
}

std::string RobustnessReport::to_text() const {
  std::ostringstream out;
  out.precision(4);
  out << "items: " << items.size() << " (scored " << scored << ", unlabeled " << unlabeled << ")\n\n";
  out << "variant       ";
  for (const auto& a : bench_agents()) out << " " << a;
  out << "\n";
  auto row = [&](const std::string& name, const std::map<std::string, double>& m) {
    out << name;
    for (std::size_t i = name.size(); i < 14; ++i) out << ' ';
    for (const auto& a : bench_agents()) {
      std::ostringstream cell;
      cell.precision(4);
      auto f = m.find(a);
      if (f == m.end()) cell << "-";
      else cell << f->second;
      std::string c = cell.str();
      out << " " << c;
      for (std::size_t i = c.size(); i < a.size(); ++i) out << ' ';
    }
    out << "\n";
  };
  for (const auto& [v, m] : per_variant) row(v, m);
  row("all", per_agent);
  out << "\n";
  for (const auto& it : items) {
    out << it.id << " [" << to_string(it.variant) << "] ";
    if (!it.scored) {
      out << "unlabeled\n";
      continue;
    }
    bool any = false;
    for (const auto& [agent, s] : it.scores)
      if (s < 1.0) {
        out << (any ? ", " : "") << agent << " miss";
        any = true;
      }
    out << (any ? "" : "ok") << "\n";
    for (auto d = it.diffs.begin(); d != it.diffs.end(); ++d) out << "    " << d.key() << ": " << d.value().dump() << "\n";
  }
  return out.str();
}

}  // namespace glagent::agents
