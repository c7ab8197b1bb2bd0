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

#include "glagent/agents/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "glagent/engine/train.hpp"
#include "glagent/error.hpp"
#include "glagent/llm/structured.hpp"
#include "glagent/rng.hpp"

namespace glagent::agents {

namespace {

constexpr const char* kRepromptSuffix = "\nRespond only with the structured block.\n";

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Lower case, alphanumerics only.
std::string squash(const std::string& s) {
  std::string out;
  for (char c : s)
    if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// A list-valued field may arrive as a list or as one comma separated string.
std::vector<std::string> as_list(const Json& v) {
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& x : v)
      if (x.is_string()) out.push_back(trim(x.get<std::string>()));
      else out.push_back(trim(x.dump()));
  } else if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(trim(part));
  } else if (!v.is_null()) {
    out.push_back(trim(v.dump()));
  }
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

void record_call(AgentContext& ctx, const std::string& agent, const llm::LlmCallRecord& rec) {
  ctx.memory.append_call(rec);
  ctx.memory.log_event(agent, "llm_call",
                       Json{{"template_id", rec.template_id},
                            {"prompt_tokens", rec.prompt_tokens},
                            {"completion_tokens", rec.completion_tokens},
                            {"latency_ms", rec.latency_ms},
                            {"cost_usd", rec.cost_usd}});
}

std::string call(AgentContext& ctx, const std::string& agent, const std::string& template_id,
                 const llm::Bindings& bindings, const std::string& suffix) {
  llm::CompletionRequest req;
  req.template_id = template_id;
  req.prompt_text = ctx.llm.registry().render(template_id, bindings) + suffix;
  req.temperature = ctx.llm.temperature;
  req.backend_id = ctx.llm.backend().id();
  auto [text, rec] = ctx.llm.complete(req);
  record_call(ctx, agent, rec);
  return text;
}

bool parse_error(const Error& e) {
  return e.code() == ErrorCode::NoStructuredBlock || e.code() == ErrorCode::MalformedValue ||
         e.code() == ErrorCode::MissingKey;
}

double now(const AgentContext& ctx) { return ctx.clock ? ctx.clock->now_ms() : 0.0; }

void warn(AgentContext& ctx, const std::string& agent, const std::string& message) {
  ctx.memory.log_event(agent, "warning", Json{{"message", message}});
}

const std::vector<std::string>& required_modules(Instance instance) {
  using namespace modules;
  static const std::vector<std::string> node = {kAggregation, kSelection, kFusion};
  static const std::vector<std::string> graph = {kAggregation, kReadout, kSelection, kFusion};
  static const std::vector<std::string> link = {kMessage,         kAggregation,    kLayerNumber, kLayerComb,
                                                kComponentNumber, kComponentComb, kInteraction};
  switch (instance) {
    case Instance::NodeF2gnn: return node;
    case Instance::GraphLrgnn: return graph;
    case Instance::LinkProfcf: return link;
  }
  return node;
}

Json dataset_stats(const engine::Dataset& d) {
  if (const auto* g = std::get_if<engine::NodeGraph>(&d))
    return Json{{"kind", "node"},
                {"nodes", g->n},
                {"arcs", g->num_arcs()},
                {"feature_dim", g->features.cols},
                {"classes", g->num_classes}};
  if (const auto* c = std::get_if<engine::GraphCollection>(&d))
    return Json{{"kind", "graph"},
                {"graphs", c->graphs.size()},
                {"feature_dim", c->feature_dim},
                {"classes", c->num_classes},
                {"folds", c->num_folds}};
  const auto& t = std::get<engine::InteractionTable>(d);
  return Json{{"kind", "link"}, {"users", t.num_users}, {"items", t.num_items}, {"interactions", t.triples.size()}};
}

}  // namespace

Json ask_structured(AgentContext& ctx, const std::string& agent, const std::string& template_id,
                    const llm::Bindings& bindings, const std::vector<std::string>& expected_keys) {
  const std::string text = call(ctx, agent, template_id, bindings, "");
  try {
    return llm::parse_structured(text, expected_keys);
  } catch (const Error& e) {
    if (!ctx.reprompt || !parse_error(e)) throw;
    ctx.memory.log_event(agent, "reprompt", Json{{"template_id", template_id}, {"error", e.what()}});
  }
  return llm::parse_structured(call(ctx, agent, template_id, bindings, kRepromptSuffix), expected_keys);
}

std::string ask_text(AgentContext& ctx, const std::string& agent, const std::string& template_id,
                     const llm::Bindings& bindings) {
  return call(ctx, agent, template_id, bindings, "");
}

// ---------------------------------------------------------------- manager

TaskPlan extract_task_plan(AgentContext& ctx, const Instruction& instruction) {
  using namespace plan_keys;
  ctx.memory.put("manager", "instruction", instruction.raw_text);
  const Json fields =
      ask_structured(ctx, "manager", "manager", {{"user_req", instruction.raw_text}}, {kData, kLevel, kType, kMetric, kPreference});
  TaskPlan plan = task_plan_from_fields(fields);

  std::vector<std::string> kept;
  for (const auto& op : plan.constraints.exclude_ops) {
    if (ctx.catalog.resolves_op(op)) kept.push_back(op);
    else warn(ctx, "manager", "dropping unknown excluded op '" + op + "'");
  }
  plan.constraints.exclude_ops = kept;
  for (const auto& n : plan.notes) warn(ctx, "manager", n);
  if (!ctx.llm.backend().simulated())
    for (const char* f : {"Learning_tasks_on_graph", "Learning_task_types", "Evaluation_metric"})
      if (!plan.reasons.count(f)) warn(ctx, "manager", std::string("no reason given for ") + f);

  ctx.memory.put("manager", "raw_fields", fields);
  ctx.memory.put("manager", "task_plan", plan.to_json());
  ctx.memory.put("manager", "reasons", plan.reasons);
  return plan;
}

Instance instance_for(const TaskPlan& plan) {
  if (plan.task_type == TaskType::Regression)
    throw Error(ErrorCode::UnsupportedTask,
                std::string(to_string(plan.task_level)) + "-level regression is parsed but the engine trains "
                "classification and ranking models only");
  if (plan.task_level == TaskLevel::Node && plan.task_type == TaskType::Classification) return Instance::NodeF2gnn;
  if (plan.task_level == TaskLevel::Graph && plan.task_type == TaskType::Classification) return Instance::GraphLrgnn;
  if (plan.task_level == TaskLevel::Link && plan.task_type == TaskType::Ranking) return Instance::LinkProfcf;
  throw Error(ErrorCode::UnsupportedTask, std::string(to_string(plan.task_level)) + "-level " +
                                              to_string(plan.task_type) + " has no matching backbone");
}

Instance select_instance(AgentContext& ctx, const TaskPlan& plan) {
  const Instance inst = instance_for(plan);
  ctx.memory.put("manager", "instance", to_string(inst));
  return inst;
}

// ---------------------------------------------------------------- data

std::vector<std::string> select_feature_engineering(AgentContext& ctx, const TaskPlan& plan,
                                                    const Instruction& instruction) {
  const auto available = ctx.catalog.lookup_transforms(plan.task_level);
  std::string content;
  for (const auto& t : available) content += "- " + t.name + ": " + t.doc_snippet + "\n";
  const Json out = ask_structured(ctx, "data", "data",
                                  {{"user_req", instruction.raw_text},
                                   {"task_plan", llm::serialize(plan.wire_fields())},
                                   {"content", content}},
                                  {"feature_engineering"});
  std::vector<std::string> chosen;
  for (const auto& name : as_list(out.at("feature_engineering"))) {
    auto it = std::find_if(available.begin(), available.end(),
                           [&](const catalog::TransformEntry& t) { return squash(t.name) == squash(name); });
    if (it == available.end()) throw Error(ErrorCode::UnknownTransform, name);
    if (std::find(chosen.begin(), chosen.end(), it->name) == chosen.end()) chosen.push_back(it->name);
  }
  if (chosen.empty()) throw Error(ErrorCode::EmptySelection, "the data agent selected no transform");
  if (chosen.size() > 3) {
    warn(ctx, "data", "keeping the first 3 of " + std::to_string(chosen.size()) + " transforms");
    chosen.resize(3);
  }
  ctx.memory.put("data", "transforms", chosen);
  if (out.contains("feature_engineering_reason"))
    ctx.memory.put("data", "reason", out.at("feature_engineering_reason"));
  return chosen;
}

engine::Dataset prepare_dataset(AgentContext& ctx, engine::Dataset d, const std::vector<std::string>& transforms) {
  for (const auto& t : transforms) d = engine::apply_transform(std::move(d), t);
  ctx.memory.put("data", "dataset", dataset_stats(d));
  return d;
}

// ---------------------------------------------------------------- configuration

std::vector<std::string> select_modules(AgentContext& ctx, const TaskPlan& plan, Instance instance) {
  const auto& offered = ctx.catalog.instance_modules(instance);
  std::string content;
  for (const auto& m : offered) {
    content += "- " + m + ":";
    const auto ops = ctx.catalog.lookup_operations(m, level_of(instance));
    for (std::size_t i = 0; i < ops.size(); ++i) content += (i ? ", " : " ") + ops[i].op_name;
    content += "\n";
  }
  const Json out = ask_structured(ctx, "configuration", "configuration.modules",
                                  {{"task_plan", llm::serialize(plan.wire_fields())},
                                   {"instance", to_string(instance)},
                                   {"content", content}},
                                  {"modules"});
  std::set<std::size_t> picked;
  for (const auto& raw : as_list(out.at("modules"))) {
    const auto& names = ctx.catalog.module_names();
    auto it = std::find_if(names.begin(), names.end(), [&](const std::string& m) { return squash(m) == squash(raw); });
    if (it == names.end()) throw Error(ErrorCode::UnknownModule, raw);
    auto pos = std::find(offered.begin(), offered.end(), *it);
    if (pos == offered.end())
      throw Error(ErrorCode::UnknownModule, *it + " is not offered by " + to_string(instance));
    picked.insert(static_cast<std::size_t>(pos - offered.begin()));
  }
  if (picked.empty()) throw Error(ErrorCode::EmptySelection, "the configuration agent selected no module");
  std::vector<std::string> modules;
  for (std::size_t i : picked) modules.push_back(offered[i]);
  ctx.memory.put("configuration", "modules", modules);
  if (out.contains("reason")) ctx.memory.put("configuration", "modules_reason", out.at("reason"));
  return modules;
}

SearchSpace build_search_space(const catalog::Catalog& cat, const TaskPlan& plan, Instance instance,
                               const std::vector<std::string>& modules, const SpaceOptions& opts,
                               std::vector<std::string>* notes) {
  for (const auto& m : required_modules(instance))
    if (std::find(modules.begin(), modules.end(), m) == modules.end())
      throw Error(ErrorCode::EmptySelection, std::string(to_string(instance)) + " needs the " + m + " module");
  const TaskLevel level = level_of(instance);
  const std::string pref = plan.preference.value_or("");
  auto note = [&](const std::string& s) {
    if (notes) notes->push_back(s);
  };

  SearchSpace space;
  space.instance = instance;
  space.modules = modules;
  space.num_blocks = opts.num_blocks;
  space.hp_table = HpTable::defaults_for(instance);
  space.hp_table.epochs = opts.epochs;
  space.hp_table.hidden_dim = opts.hidden_dim;
  for (const auto& m : modules) {
    const auto entries = cat.lookup_operations(m, level);
    std::vector<catalog::CatalogEntry> base;
    for (const auto& e : entries)
      if (e.default_candidate || catalog::matches_preference(e, pref)) base.push_back(e);
    if (base.empty()) {
      note(m + " has no candidate operations at " + to_string(level) + " level; no decision site");
      continue;
    }
    auto kept = catalog::filter_candidates(base, plan.constraints, pref);
    std::vector<std::string> ops;
    for (const auto& e : kept) {
      if (!e.implemented) {
        note(m + "/" + e.op_name + " is not implemented by the engine; dropped");
        continue;
      }
      ops.push_back(e.op_name);
    }
    if (ops.empty()) throw Error(ErrorCode::AllCandidatesFiltered, m + ": no implemented candidate remains");
    if (m == modules::kLayerNumber || m == modules::kComponentNumber) {
      auto& counts = m == modules::kLayerNumber ? space.layer_counts : space.component_counts;
      for (const auto& o : ops) counts.push_back(std::stoi(o));
    } else {
      space.candidates.emplace_back(m, ops);
    }
  }
  return space;
}

SearchSpace assemble_search_space(AgentContext& ctx, const TaskPlan& plan, Instance instance,
                                  const std::vector<std::string>& modules, const SpaceOptions& opts) {
  std::vector<std::string> notes;
  SearchSpace space = build_search_space(ctx.catalog, plan, instance, modules, opts, &notes);
  for (const auto& n : notes) warn(ctx, "configuration", n);
  ctx.memory.put("configuration", "search_space", space.to_json());
  ctx.memory.put("configuration", "space_digest", space.digest());
  if (!opts.space_file.empty()) {
    std::ofstream out(opts.space_file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + opts.space_file.string());
    out << space.serialize() << "\n";
    ctx.memory.put("configuration", "space_file", opts.space_file.filename().string());
  }
  return space;
}

const char* to_string(Algorithm a) noexcept { return a == Algorithm::Random ? "random" : "differentiable"; }

Algorithm algorithm_from_string(const std::string& s) {
  const std::string c = squash(s);
  if (c.find("differentiable") != std::string::npos || c == "darts") return Algorithm::Differentiable;
  if (c.find("random") != std::string::npos) return Algorithm::Random;
  throw Error(ErrorCode::InvalidEnumValue, "algorithm: " + s);
}

bool differentiable_gate(const SearchSpace& space, const catalog::Catalog& cat, std::string* why) {
  auto fail = [&](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  if (!search::is_relaxable(space)) return fail("layer-number and component-number sites are discrete sizes");
  if (search::count_genotypes(space) <= 1) return fail("the space holds a single genotype");
  for (const auto& [module, ops] : space.candidates) {
    for (const auto& op : ops) {
      const catalog::CatalogEntry* e = cat.find(module, op);
      if (!e) return fail(module + "/" + op + " is not in the catalog");
      if (e->is_coarsening) return fail(module + "/" + op + " coarsens the graph");
      if (!e->differentiable_compatible) return fail(module + "/" + op + " cannot be mixed continuously");
      if (module == modules::kAggregation && !engine::engine_implements(op))
        return fail(module + "/" + op + " has no engine implementation");
    }
  }
  return true;
}

AlgorithmChoice select_algorithm(AgentContext& ctx, const SearchSpace& space, const Instruction& instruction,
                                 const TaskPlan& plan) {
  Json cands = Json::object();
  for (const auto& [m, ops] : space.candidates) cands[m] = ops;
  if (!space.layer_counts.empty()) cands[modules::kLayerNumber] = space.layer_counts;
  if (!space.component_counts.empty()) cands[modules::kComponentNumber] = space.component_counts;
  const std::string content =
      "- Random Search: samples whole architectures and trains each one; works for every space.\n"
      "- Differentiable Search: trains one mixed supernet and reads the architecture off its weights; "
      "needs continuously mixable decisions.\n";

  AlgorithmChoice choice;
  choice.efficiency = catalog::to_string(plan.constraints.efficiency);
  bool wants_differentiable = false;
  try {
    const Json out = ask_structured(ctx, "configuration", "configuration.algorithm",
                                    {{"user_req", instruction.raw_text},
                                     {"task_plan", llm::serialize(plan.wire_fields())},
                                     {"space", llm::serialize(cands)},
                                     {"content", content}},
                                    {"algorithm"});
    choice.suggested = out.at("algorithm").is_string() ? out.at("algorithm").get<std::string>() : out.at("algorithm").dump();
    if (out.contains("efficiency") && out.at("efficiency").is_string())
      choice.efficiency = catalog::to_string(catalog::efficiency_from_string(out.at("efficiency").get<std::string>()));
    if (out.contains("reason") && out.at("reason").is_string()) choice.reason = out.at("reason").get<std::string>();
    wants_differentiable = algorithm_from_string(choice.suggested) == Algorithm::Differentiable;
  } catch (const Error& e) {
    if (!parse_error(e) && e.code() != ErrorCode::InvalidEnumValue) throw;
    warn(ctx, "configuration", std::string("unreadable algorithm suggestion, using random search: ") + e.what());
  }

  std::string why;
  if (wants_differentiable && differentiable_gate(space, ctx.catalog, &why)) {
    choice.algorithm = Algorithm::Differentiable;
  } else {
    choice.algorithm = Algorithm::Random;
    if (wants_differentiable) {
      warn(ctx, "configuration", "differentiable search rejected: " + why);
      choice.reason = "differentiable search rejected: " + why;
    }
  }
  ctx.memory.put("configuration", "algorithm", to_string(choice.algorithm));
  ctx.memory.put("configuration", "algorithm_suggested", choice.suggested);
  ctx.memory.put("configuration", "algorithm_reason", choice.reason);
  ctx.memory.put("configuration", "efficiency", choice.efficiency);
  return choice;
}

// ---------------------------------------------------------------- searching

search::SearchLog run_search_stage(AgentContext& ctx, const SearchSpace& space, Algorithm algorithm,
                                   const engine::Dataset& d, const SearchStageOptions& opts) {
  if (opts.budget < 1) throw Error(ErrorCode::BudgetNonPositive, "search budget must be at least 1");
  ctx.memory.put("searching", "execution_plan",
                 Json{{"space_file", opts.space_file},
                      {"transforms", opts.transforms},
                      {"seed", opts.seed},
                      {"budget", opts.budget},
                      {"algorithm", to_string(algorithm)},
                      {"diff_steps", opts.diff_steps},
                      {"test_fold", opts.test_fold},
                      {"device", "cpu"}});
  const double start = now(ctx);
  search::SearchLog log;
  const engine::HyperParams hp = search::search_hyperparams(space);
  if (algorithm == Algorithm::Differentiable) {
    search::DiffConfig cfg;
    cfg.steps = opts.diff_steps;
    cfg.hp = hp;
    cfg.test_fold = opts.test_fold;
    log = search::differentiable_search(space, d, cfg, opts.seed, ctx.clock);
  } else {
    log = search::random_search(space, opts.budget, search::make_engine_eval(d, hp, opts.test_fold), opts.seed,
                                ctx.clock);
  }
  ctx.memory.put("searching", "search_log", log.to_json());
  ctx.memory.put("searching", "search_wall_ms", now(ctx) - start);
  return log;
}

Genotype extract_searched_model(const search::SearchLog& log) {
  return log.trials[search::best_trial_index(log)].genotype;
}

Genotype extract_searched_model(AgentContext& ctx, const search::SearchLog& log) {
  const std::size_t best = search::best_trial_index(log);
  const Genotype& g = log.trials[best].genotype;
  ctx.memory.put("searching", "genotype", g.to_json());
  ctx.memory.put("searching", "genotype_text", g.to_string());
  ctx.memory.put("searching", "best_trial_index", best);
  return g;
}

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json search_digest(const search::SearchLog& log) {
  const std::size_t best = search::best_trial_index(log);
  const auto& t = log.trials[best];
  const auto failed = std::count_if(log.trials.begin(), log.trials.end(), [](const auto& x) { return x.failed; });
  return Json{{"algorithm", log.algorithm},
              {"trials", log.trials.size()},
              {"failed", failed},
              {"best_index", best},
              {"best_val_metric", finite_or_null(t.val_metric)},
              {"best_test_metric", finite_or_null(t.test_metric)},
              {"best_genotype", t.genotype.to_string()}};
}

Json tune_digest(const hpo::TuneLog& log) {
  const int best = hpo::best_index(log);
  const auto& t = log.trials[static_cast<std::size_t>(best)];
  const auto failed = std::count_if(log.trials.begin(), log.trials.end(), [](const auto& x) { return x.failed; });
  return Json{{"trials", log.trials.size()},
              {"failed", failed},
              {"best_index", best},
              {"best_val_metric", finite_or_null(t.val_metric)},
              {"best_test_metric", finite_or_null(t.test_metric)},
              {"best_hyperparams", t.hyperparams.to_json()}};
}

std::string summarize_stage(AgentContext& ctx, const std::string& stage, const Json& digest) {
  if (stage != "searching" && stage != "tuning")
    throw Error(ErrorCode::InvalidParameter, "summaries exist for searching and tuning, not " + stage);
  if (!digest.is_object() || !digest.contains("trials") || digest.at("trials").get<std::size_t>() == 0)
    throw Error(ErrorCode::EmptyLog, stage + " digest has no trials");
  const std::string text = ask_text(ctx, stage, stage + ".summary", {{"digest", digest.dump()}});
  ctx.memory.put(stage, "digest", digest);
  ctx.memory.put(stage, "summary", text);
  return text;
}

// ---------------------------------------------------------------- tuning

TuningResult run_tuning_stage(AgentContext& ctx, const Genotype& g, const SearchSpace& space,
                              const engine::Dataset& d, const TuneStageOptions& opts) {
  const double start = now(ctx);
  TuningResult r;
  r.log = hpo::tune(g, space, opts.budget, hpo::make_engine_tune_eval(g, d, opts.test_fold), opts.seed, ctx.clock);
  r.best = hpo::best_trial(r.log);

  // Retrain the chosen configuration from several seeds for mean and spread.
  const std::uint64_t base = search::trial_seed(opts.seed, g);
  std::vector<double> vals, tests;
  for (int k = 0; k < opts.final_repeats; ++k) {
    const std::uint64_t s = mix_seed(base, static_cast<std::uint64_t>(k));
    engine::ModelState m = engine::build_model(g, engine::dims_for(d, static_cast<std::size_t>(r.best.hidden_dim)), s);
    engine::TrainOptions to;
    to.test_fold = opts.test_fold;
    const engine::TrainResult tr = engine::train(m, d, r.best, s, to);
    vals.push_back(tr.best_val);
    tests.push_back(tr.test_at_best);
  }
  auto mean_std = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    return std::pair<double, double>{m, std::sqrt(var / static_cast<double>(v.size()))};
  };
  const auto [vm, vs] = mean_std(vals);
  const auto [tm, ts] = mean_std(tests);
  r.final_metrics = Json{{"metric", engine::default_metric(d).to_string()},
                         {"val_mean", vm},
                         {"val_std", vs},
                         {"test_mean", tm},
                         {"test_std", ts},
                         {"repeats", opts.final_repeats}};
  ctx.memory.put("tuning", "tune_log", r.log.to_json());
  ctx.memory.put("tuning", "hyperparams", r.best.to_json());
  ctx.memory.put("tuning", "final_metrics", r.final_metrics);
  ctx.memory.put("tuning", "tune_wall_ms", now(ctx) - start);
  return r;
}

// ---------------------------------------------------------------- response

Json RunSummary::to_json() const {
  return Json{{"prediction_results", prediction_results},
              {"architecture", Json{{"text", architecture.to_string()}, {"structured", architecture.to_json()}}},
              {"hyperparameters", hyperparameters.to_json()},
              {"resource_usage", resource_usage},
              {"instruction_echo", instruction_echo},
              {"prose", prose}};
}

RunSummary RunSummary::from_json(const Json& j) {
  try {
    RunSummary s;
    s.prediction_results = j.at("prediction_results");
    s.architecture = Genotype::from_json(j.at("architecture").at("structured"));
    s.hyperparameters = engine::HyperParams::from_json(j.at("hyperparameters"));
    s.resource_usage = j.at("resource_usage");
    s.instruction_echo = j.at("instruction_echo").get<std::string>();
    s.prose = j.value("prose", std::string());
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("run summary: ") + e.what());
  }
}

std::string RunSummary::to_text() const {
  std::ostringstream out;
  out.precision(6);
  out << "Instruction\n  " << instruction_echo << "\n\n";
  out << "Prediction results\n";
  for (auto it = prediction_results.begin(); it != prediction_results.end(); ++it)
    out << "  " << it.key() << ": " << it.value().at("mean").get<double>() << " +/- "
        << it.value().at("std").get<double>() << "\n";
  out << "\nArchitecture\n  " << architecture.to_string() << "\n\n";
  out << "Hyperparameters\n";
  const Json hp = hyperparameters.to_json();
  for (auto it = hp.begin(); it != hp.end(); ++it) out << "  " << it.key() << ": " << it.value().dump() << "\n";
  out << "\nResource usage\n";
  const Json& wall = resource_usage.at("wall_seconds_per_stage");
  const Json& tok = resource_usage.at("tokens_per_stage");
  const Json& cost = resource_usage.at("cost_usd_per_stage");
  std::vector<std::string> stages = {"manager", "data", "configuration", "searching", "tuning", "response"};
  for (auto it = wall.begin(); it != wall.end(); ++it)
    if (std::find(stages.begin(), stages.end(), it.key()) == stages.end()) stages.push_back(it.key());
  for (const auto& s : stages) {
    if (!wall.contains(s)) continue;
    out << "  " << s << ": " << wall.at(s).get<double>() << " s, " << tok.at(s).get<long>() << " tokens, $"
        << cost.at(s).get<double>() << "\n";
  }
  out << "  total cost: $" << resource_usage.at("cost_usd_total").get<double>() << "\n";
  if (!prose.empty()) out << "\nReport\n" << prose << "\n";
  return out.str();
}

Json resource_usage(const memory::RunBundle& bundle) {
  static const std::vector<std::string> stages = {"manager", "data", "configuration", "searching", "tuning", "response"};
  Json wall = Json::object(), tokens = Json::object(), costs = Json::object();
  for (const auto& s : stages) {
    double ms = 0.0;
    auto ns = bundle.entries.find(s);
    if (ns != bundle.entries.end()) {
      auto w = ns->second.find("wall_ms");
      if (w != ns->second.end()) ms = w->second.get<double>();
    }
    wall[s] = ms / 1000.0;
    tokens[s] = 0L;
    costs[s] = 0.0;
  }
  double total = 0.0;
  for (const auto& c : bundle.call_records) {
    const std::string s = llm::stage_of(c.template_id);
    if (!tokens.contains(s)) {
      tokens[s] = 0L;
      costs[s] = 0.0;
      wall[s] = 0.0;
    }
    tokens[s] = tokens[s].get<long>() + c.prompt_tokens + c.completion_tokens;
    costs[s] = costs[s].get<double>() + c.cost_usd;
    total += c.cost_usd;
  }
  return Json{{"wall_seconds_per_stage", wall},
              {"tokens_per_stage", tokens},
              {"cost_usd_per_stage", costs},
              {"cost_usd_total", total}};
}

RunSummary compose_response(AgentContext& ctx, const Instruction& instruction) {
  const double start = now(ctx);
  const TaskPlan plan = TaskPlan::from_json(ctx.memory.get("manager", "task_plan"));
  RunSummary s;
  s.architecture = Genotype::from_json(ctx.memory.get("searching", "genotype"));
  s.hyperparameters = engine::HyperParams::from_json(ctx.memory.get("tuning", "hyperparams"));
  const Json fm = ctx.memory.get("tuning", "final_metrics");
  const std::string metric = fm.at("metric").get<std::string>();
  s.prediction_results[metric] = Json{{"mean", fm.at("test_mean")}, {"std", fm.at("test_std")}};
  s.prediction_results["val_" + metric] = Json{{"mean", fm.at("val_mean")}, {"std", fm.at("val_std")}};
  s.instruction_echo = instruction.raw_text;

  const Json results{{"task_plan", plan.wire_fields()},
                     {"prediction_results", s.prediction_results},
                     {"architecture", s.architecture.to_string()},
                     {"hyperparameters", s.hyperparameters.to_json()}};
  s.prose = ask_text(ctx, "response", "response", {{"user_req", instruction.raw_text}, {"summary", results.dump()}});
  ctx.memory.put("response", "prose", s.prose);
  ctx.memory.put("response", "wall_ms", now(ctx) - start);
  s.resource_usage = resource_usage(ctx.memory.bundle());
  ctx.memory.put("response", "summary", s.to_json());
  return s;
}

// ---------------------------------------------------------------- LLM-GNN baseline

namespace {

bool known_non_homophilous(const std::string& data_name) {
  const std::string d = squash(data_name);
  for (const char* n : {"genius", "actor", "wisconsin", "texas", "cornell", "chameleon", "squirrel"})
    if (d.find(n) != std::string::npos) return true;
  return false;
}

int number_word(const std::string& w) {
  static const std::vector<std::string> words = {"one", "two", "three", "four", "five", "six", "seven", "eight"};
  for (std::size_t i = 0; i < words.size(); ++i)
    if (w == words[i]) return static_cast<int>(i) + 1;
  if (!w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return std::stoi(w);
  return 0;
}

std::vector<std::string> words_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool looks_like_op(const std::string& w) {
  if (w == "GNN" || w == "GNNs") return false;
  if (w.size() > 4 && w.compare(w.size() - 4, 4, "Conv") == 0) return true;
  return w.size() >= 2 && std::all_of(w.begin(), w.end(), [](char c) { return std::isupper(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)); }) &&
         std::isalpha(static_cast<unsigned char>(w[0]));
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string render_baseline_prompt(const TaskPlan& plan, const BaselineFlags& flags) {
  std::string addenda;
  if (flags.non_homophilous || known_non_homophilous(plan.data_name))
    addenda += " This graph is non-homophilous: linked nodes often carry different labels, and using MLPs may have "
               "better performance than general GNNs here.";
  if (flags.multi_component || plan.task_type == TaskType::Ranking)
    addenda += " Several GNN components may be combined; state how many and how their outputs are merged.";
  const std::string task = std::string(to_string(plan.task_level)) + "-level " + to_string(plan.task_type);
  return llm::render_prompt("baseline.llm_gnn", {{"data_name", plan.data_name}, {"task", task}, {"addenda", addenda}});
}

DirectSuggestion map_suggestion(const std::string& text, const TaskPlan& plan, const catalog::Catalog& cat) {
  DirectSuggestion s;
  const auto hp_pos = lower(text).find("hyper");
  s.description = trim(hp_pos == std::string::npos ? text : text.substr(0, hp_pos));
  const std::vector<std::string> words = words_of(s.description);

  // Depth: "<n>-layer" or "<word>-layer".
  int layers = 0;
  for (std::size_t i = 0; i + 1 < words.size(); ++i)
    if (lower(words[i + 1]) == "layer" || lower(words[i + 1]) == "layers") {
      layers = number_word(lower(words[i]));
      if (layers) break;
    }
  if (!layers) {
    layers = 2;
    s.notes.push_back("no depth given; using 2 blocks");
  }
  if (layers > 4) {
    s.notes.push_back("depth " + std::to_string(layers) + " clamped to 4 blocks");
    layers = 4;
  }

  const TaskLevel level = plan.task_level;
  const auto aggs = cat.lookup_operations(modules::kAggregation, level);
  std::string op;
  std::string unknown;
  for (const auto& w : words) {
    auto it = std::find_if(aggs.begin(), aggs.end(), [&](const catalog::CatalogEntry& e) { return catalog::matches_preference(e, w); });
    if (it != aggs.end()) {
      op = it->op_name;
      if (!it->implemented || !engine::engine_implements(op)) {
        s.notes.push_back(op + " is not built by the engine; nearest expressible operation GCN used");
        op = "GCN";
      }
      break;
    }
    if (unknown.empty() && looks_like_op(w)) unknown = w;
  }
  if (op.empty())
    throw Error(ErrorCode::UnmappableSuggestion,
                unknown.empty() ? "suggestion names no aggregation operation" : "operation '" + unknown + "' is not in the catalog");

  const std::string low = lower(s.description);
  if (level == TaskLevel::Link) {
    Genotype g;
    g.instance = Instance::LinkProfcf;
    g.link.message = low.find("hadamard") != std::string::npos ? "HADAMARD" : "IDENTITY";
    g.link.aggregation = op;
    g.link.num_layers = layers;
    g.link.layer_comb = low.find("sum") != std::string::npos ? "SUM" : "STACK";
    g.link.num_components = 1;
    g.link.comp_comb = "MEAN";
    g.link.interaction = low.find("concat") != std::string::npos ? "CONCAT_MLP" : "DOT";
    s.genotype = g;
  } else {
    Genotype g;
    g.instance = level == TaskLevel::Graph ? Instance::GraphLrgnn : Instance::NodeF2gnn;
    for (int i = 0; i < layers; ++i) g.blocks.push_back(BlockGene{op, {i}, "sum"});
    if (low.find("concat") != std::string::npos)
      s.notes.push_back("layer concatenation mapped to the backbone's summed block outputs");
    if (g.instance == Instance::GraphLrgnn) g.readout = low.find("mean") != std::string::npos ? "global_mean" : "global_sum";
    s.genotype = g;
  }

  // Hyperparameters from the trailing brace block, if any.
  Json block = Json::object();
  try {
    block = llm::parse_structured(text);
  } catch (const Error& e) {
    if (!parse_error(e)) throw;
    s.notes.push_back("no hyperparameter block; defaults used");
  }
  auto number = [](const Json& v) {
    if (v.is_number()) return v.get<double>();
    return std::stod(v.get<std::string>());
  };
  for (auto it = block.begin(); it != block.end(); ++it) {
    const std::string k = squash(it.key());
    try {
      if (k == "hidden" || k == "hiddensize" || k == "hiddendim") s.hyperparams.hidden_dim = static_cast<int>(number(it.value()));
      else if (k == "dropout" || k == "dropoutratio" || k == "dropoutrate") s.hyperparams.dropout = number(it.value());
      else if (k == "lr" || k == "learningrate") s.hyperparams.learning_rate = number(it.value());
      else if (k == "wd" || k == "weightdecay" || k == "l2") s.hyperparams.weight_decay = number(it.value());
      else if (!k.empty()) s.notes.push_back("ignored hyperparameter '" + it.key() + "'");
    } catch (const std::exception&) {
      throw Error(ErrorCode::UnmappableSuggestion, "hyperparameter '" + it.key() + "' is not a number");
    }
  }
  try {
    s.hyperparams.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::UnmappableSuggestion, e.what());
  }
  return s;
}

DirectSuggestion suggest_direct_gnn(AgentContext& ctx, const TaskPlan& plan, const BaselineFlags& flags) {
  llm::CompletionRequest req;
  req.template_id = "baseline.llm_gnn";
  req.prompt_text = render_baseline_prompt(plan, flags);
  req.temperature = ctx.llm.temperature;
  req.backend_id = ctx.llm.backend().id();
  auto [text, rec] = ctx.llm.complete(req);
  record_call(ctx, "baseline", rec);
  DirectSuggestion s = map_suggestion(text, plan, ctx.catalog);
  for (const auto& n : s.notes) warn(ctx, "baseline", n);
  ctx.memory.log_event("baseline", "suggestion",
                       Json{{"description", s.description}, {"genotype", s.genotype.to_string()},
                            {"hyperparams", s.hyperparams.to_json()}});
  return s;
}

}  // namespace glagent::agents
