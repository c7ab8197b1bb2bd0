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
#include <map>

#include "glagent/agents/bench.hpp"
#include "glagent/agents/config.hpp"
#include "glagent/agents/cost_report.hpp"
#include "glagent/agents/pipeline.hpp"
#include "glagent/error.hpp"
#include "test_util.hpp"

namespace glagent::agents {
namespace {

using testing::read_text;
using testing::source_path;

RunConfig small_config(const std::string& name) {
  RunConfig cfg = RunConfig::load(source_path("data/configs/" + name));
  cfg.search_budget = 3;
  cfg.tune_budget = 2;
  cfg.epochs = 30;
  cfg.hidden_dim = 8;
  cfg.diff_steps = 20;
  cfg.final_repeats = 2;
  return cfg;
}

Instruction instruction_file(const std::string& name) {
  return load_instruction(source_path("data/instructions/" + name).string());
}

TEST(Config, RejectsUnknownKeysAndResolvesPaths) {
  const RunConfig cfg = RunConfig::load(source_path("data/configs/sbm_node.json"));
  EXPECT_EQ(cfg.seed, 11u);
  EXPECT_EQ(cfg.clock_kind(), "logical");
  EXPECT_TRUE(std::filesystem::exists(cfg.resolve(cfg.fixture_path)));
  EXPECT_EQ(RunConfig::from_json(cfg.to_json()).to_json(), cfg.to_json());
  Json j = cfg.to_json();
  j["budget"] = 3;
  try {
    RunConfig::from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
  RunConfig http = cfg;
  http.backend = "http";
  EXPECT_EQ(http.clock_kind(), "wall");
  RunConfig no_fixture = cfg;
  no_fixture.fixture_path.clear();
  EXPECT_THROW(make_backend(no_fixture), Error);
}

TEST(Pipeline, NodeRunWritesEveryOutput) {
  const auto dir = testing::scratch_dir("pipeline_node");
  const RunConfig cfg = small_config("sbm_node.json");
  PipelineOptions o;
  o.out_dir = dir;
  const PipelineResult r = run_pipeline(instruction_file("sbm_node.txt"), cfg, o);

  for (const char* f : {"bundle.json", "summary.json", "summary.txt", "search_log.jsonl", "tune_log.json", "space.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  EXPECT_EQ(memory::load_run_bundle(dir / "bundle.json"), r.bundle);
  EXPECT_EQ(RunSummary::from_json(Json::parse(read_text(dir / "summary.json"))).to_json(), r.summary.to_json());

  for (const auto& ns : memory::namespaces()) EXPECT_TRUE(r.bundle.entries.count(ns)) << ns;
  EXPECT_TRUE(r.summary.prediction_results.contains("accuracy"));
  const double acc = r.summary.prediction_results.at("accuracy").at("mean").get<double>();
  EXPECT_GE(acc, 0.0);
  EXPECT_LE(acc, 1.0);
  EXPECT_EQ(r.summary.architecture.to_string(), r.bundle.entries.at("searching").at("genotype_text"));
  EXPECT_FALSE(r.summary.prose.empty());

  // Under the logical clock a stage takes exactly the declared latency of its calls.
  std::map<std::string, double> latency;
  for (const auto& c : r.bundle.call_records) latency[llm::stage_of(c.template_id)] += c.latency_ms;
  const Json& wall = r.summary.resource_usage.at("wall_seconds_per_stage");
  for (const char* s : {"manager", "data", "configuration", "searching", "tuning", "response"})
    EXPECT_NEAR(wall.at(s).get<double>(), latency[s] / 1000.0, 1e-12) << s;
}

TEST(Pipeline, SameInputsGiveIdenticalBundles) {
  const RunConfig cfg = small_config("sbm_node.json");
  const Instruction ins = instruction_file("sbm_node.txt");
  const PipelineResult a = run_pipeline(ins, cfg);
  const PipelineResult b = run_pipeline(ins, cfg);
  EXPECT_EQ(memory::dump_bundle(a.bundle), memory::dump_bundle(b.bundle));
  EXPECT_EQ(a.summary.to_json().dump(), b.summary.to_json().dump());

  RunConfig other = cfg;
  other.seed = cfg.seed + 1;
  EXPECT_NE(compute_run_id(ins, other), compute_run_id(ins, cfg));
  EXPECT_EQ(compute_run_id(ins, cfg), a.bundle.run_id);
  EXPECT_EQ(a.bundle.run_id.size(), 16u);
}

TEST(Pipeline, LinkAndGraphRuns) {
  const PipelineResult link = run_pipeline(instruction_file("link_interactions.txt"), small_config("link_interactions.json"));
  EXPECT_EQ(link.summary.architecture.instance, Instance::LinkProfcf);
  EXPECT_EQ(link.bundle.entries.at("configuration").at("algorithm"), "random");
  EXPECT_TRUE(link.summary.prediction_results.contains("recall_at_20"));

  const PipelineResult graph = run_pipeline(instruction_file("graph_motif.txt"), small_config("graph_motif.json"));
  EXPECT_EQ(graph.summary.architecture.instance, Instance::GraphLrgnn);
  EXPECT_EQ(graph.bundle.entries.at("configuration").at("algorithm"), "differentiable");
  EXPECT_FALSE(graph.summary.architecture.readout.empty());
}

TEST(Pipeline, RegressionFailsAtSelectInstanceAndExportsBundle) {
  const auto dir = testing::scratch_dir("pipeline_regression");
  PipelineOptions o;
  o.out_dir = dir;
  o.backend = std::make_shared<llm::MockBackend>(llm::load_fixture_file(source_path("data/fixtures/manager_rows.json")));
  try {
    run_pipeline(instruction_file("environment_network.txt"), small_config("sbm_node.json"), o);
    FAIL();
  } catch (const StageFailure& e) {
    EXPECT_EQ(e.stage(), "manager");
    EXPECT_EQ(e.operation(), "select_instance");
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedTask);
  }
  const memory::RunBundle b = memory::load_run_bundle(dir / "bundle.json");
  EXPECT_EQ(b.log.back().kind, "stage_failed");
  EXPECT_EQ(b.log.back().payload.at("operation"), "select_instance");
  EXPECT_TRUE(b.entries.at("manager").count("task_plan"));
  EXPECT_FALSE(std::filesystem::exists(dir / "summary.json"));
}

TEST(Pipeline, DatasetKindMustMatchPlan) {
  PipelineOptions o;
  o.backend = std::make_shared<llm::MockBackend>(llm::load_fixture_file(source_path("data/fixtures/graph_motif.json")));
  try {
    run_pipeline(instruction_file("graph_motif.txt"), small_config("sbm_node.json"), o);
    FAIL();
  } catch (const StageFailure& e) {
    EXPECT_EQ(e.stage(), "data");
    EXPECT_EQ(e.operation(), "load_dataset");
    EXPECT_EQ(e.code(), ErrorCode::DatasetMismatch);
  }
}

// ---------------------------------------------------------------- bench

struct MicroBench {
  std::vector<Instruction> corpus;
  std::map<std::string, GoldItem> gold;
};

MicroBench micro(const std::set<std::string>& ids) {
  MicroBench m;
  for (auto& ins : parse_corpus(read_text(source_path("data/bench/corpus.txt"))))
    if (ids.count(*ins.corpus_id)) m.corpus.push_back(ins);
  for (auto& [id, item] : parse_gold(Json::parse(read_text(source_path("data/bench/gold.json")))))
    if (ids.count(id)) m.gold[id] = item;
  return m;
}

std::shared_ptr<llm::Backend> bench_backend(const std::string& file) {
  return std::make_shared<llm::MockBackend>(llm::load_fixture_file(source_path("data/bench/" + file)));
}

TEST(Bench, ConsistentFixturesScoreOne) {
  const MicroBench m = micro({"cora", "physics"});
  const RobustnessReport r = bench_robustness(m.corpus, m.gold, bench_backend("fixtures.json"));
  EXPECT_EQ(r.scored, 2u);
  for (const auto& a : bench_agents()) EXPECT_DOUBLE_EQ(r.per_agent.at(a), 1.0) << a;
}

TEST(Bench, CorruptedManagerIsChargedOnce) {
  const MicroBench m = micro({"cora", "physics"});
  const RobustnessReport r = bench_robustness(m.corpus, m.gold, bench_backend("fixtures_corrupted.json"));
  EXPECT_DOUBLE_EQ(r.per_agent.at("manager"), 0.5);
  for (const char* a : {"data", "configuration", "searching", "tuning"}) EXPECT_DOUBLE_EQ(r.per_agent.at(a), 1.0) << a;
  const auto& physics = *std::find_if(r.items.begin(), r.items.end(), [](const ItemResult& i) { return i.id == "physics"; });
  EXPECT_DOUBLE_EQ(physics.scores.at("manager"), 0.0);
  EXPECT_TRUE(physics.diffs.contains("manager"));
}

TEST(Bench, PaperOnlyAndSchemaChecks) {
  const MicroBench m = micro({"cora", "physics"});
  BenchOptions o;
  o.paper_only = true;
  const RobustnessReport r = bench_robustness(m.corpus, m.gold, bench_backend("fixtures.json"), o);
  EXPECT_EQ(r.scored, 1u);
  EXPECT_EQ(r.unlabeled, 1u);

  std::vector<Instruction> no_id = m.corpus;
  no_id[0].corpus_id.reset();
  EXPECT_THROW(bench_robustness(no_id, m.gold, bench_backend("fixtures.json")), Error);

  auto extra = m.gold;
  extra["ghost"] = m.gold.at("cora");
  try {
    bench_robustness(m.corpus, extra, bench_backend("fixtures.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
  }

  Json gold = Json::parse(read_text(source_path("data/bench/gold.json")));
  gold["items"]["cora"]["surprise"] = 1;
  EXPECT_THROW(parse_gold(gold), Error);
  gold = Json::parse(read_text(source_path("data/bench/gold.json")));
  gold["items"]["cora"].erase("modules");
  EXPECT_THROW(parse_gold(gold), Error);
}

// ---------------------------------------------------------------- cost report

llm::LlmCallRecord call(const std::string& t, long p, long c, const llm::RateCard& rc) {
  llm::LlmCallRecord r;
  r.template_id = t;
  r.prompt_tokens = p;
  r.completion_tokens = c;
  r.cost_usd = rc.cost(p, c);
  return r;
}

TEST(CostReport, SumsPerStageWithRateCardFromBundle) {
  const llm::RateCard rc{0.02, 0.02};
  memory::RunBundle b;
  b.entries["engine"]["rate_card"] = rc.to_json();
  b.entries["manager"]["wall_ms"] = 1200.0;
  b.call_records = {call("manager", 500, 200, rc), call("data", 800, 250, rc),
                    call("configuration.modules", 3000, 650, rc), call("configuration.algorithm", 2500, 500, rc)};
  const CostReport r = cost_report(b);
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.rows[0].stage, "manager");
  EXPECT_EQ(r.rows[2].prompt_tokens, 5500);
  EXPECT_EQ(r.rows[2].completion_tokens, 1150);
  EXPECT_NEAR(r.rows[2].cost_usd, 6650 * 0.02 / 1000, 1e-12);
  EXPECT_NEAR(r.total.cost_usd, (700 + 1050 + 6650) * 0.02 / 1000, 1e-12);
  EXPECT_DOUBLE_EQ(r.rows[0].wall_seconds, 1.2);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.rate_card.usd_per_1k_prompt, 0.02);
}

TEST(CostReport, TamperedRecordWarns) {
  const llm::RateCard rc{0.02, 0.02};
  memory::RunBundle b;
  b.entries["engine"]["rate_card"] = rc.to_json();
  b.call_records = {call("manager", 100, 100, rc), call("response", 100, 100, rc)};
  b.call_records[1].cost_usd += 1e-6;
  const CostReport r = cost_report(b);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("call 1 (response)"), std::string::npos);
  EXPECT_NE(r.to_text().find("warning: integrity"), std::string::npos);
}

TEST(CostReport, EmptyBundleIsAllZeros) {
  const CostReport r = cost_report(memory::RunBundle{});
  ASSERT_EQ(r.rows.size(), 6u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.prompt_tokens + row.completion_tokens, 0);
    EXPECT_EQ(row.cost_usd, 0.0);
    EXPECT_EQ(row.wall_seconds, 0.0);
  }
  EXPECT_EQ(r.total.cost_usd, 0.0);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(CostReport, MatchesPipelineRun) {
  const PipelineResult run = run_pipeline(instruction_file("sbm_node.txt"), small_config("sbm_node.json"));
  const CostReport r = cost_report(run.bundle);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_NEAR(r.total.cost_usd, run.summary.resource_usage.at("cost_usd_total").get<double>(), 1e-12);
  for (const auto& row : r.rows)
    EXPECT_EQ(row.prompt_tokens + row.completion_tokens,
              run.summary.resource_usage.at("tokens_per_stage").at(row.stage).get<long>())
        << row.stage;
}

}  // namespace
}  // namespace glagent::agents
