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

#include "glagent/agents/pipeline.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glagent/error.hpp"
#include "glagent/rng.hpp"

namespace glagent::agents {

namespace {

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + p.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + p.string());
}

// Tracks the stage and operation in progress so a failure can name both.
class StageRunner {
 public:
  StageRunner(memory::MemoryStore& mem, const Clock& clock) : mem_(mem), clock_(clock) {}

  void begin(const std::string& stage) {
    stage_ = stage;
    start_ = clock_.now_ms();
    mem_.log_event(stage, "stage_start");
  }
  void op(const std::string& name) { op_ = name; }
  void end(bool record_wall = true) {
    if (record_wall) mem_.put(stage_, "wall_ms", clock_.now_ms() - start_);
    mem_.log_event(stage_, "stage_end");
  }
  const std::string& stage() const { return stage_; }
  const std::string& operation() const { return op_; }

 private:
  memory::MemoryStore& mem_;
  const Clock& clock_;
  std::string stage_ = "manager";
  std::string op_ = "setup";
  double start_ = 0.0;
};

}  // namespace

std::shared_ptr<llm::Backend> make_backend(const RunConfig& cfg) {
  if (cfg.backend == "mock") {
    if (cfg.fixture_path.empty()) throw Error(ErrorCode::InvalidConfig, "the mock backend needs fixture_path");
    return std::make_shared<llm::MockBackend>(llm::load_fixture_file(cfg.resolve(cfg.fixture_path)));
  }
  if (cfg.backend == "http") return std::make_shared<llm::HttpBackend>(llm::HttpSettings::from_env());
  throw Error(ErrorCode::InvalidConfig, "unknown backend '" + cfg.backend + "'");
}

std::string compute_run_id(const Instruction& instruction, const RunConfig& cfg) {
  std::string material = instruction.raw_text;
  material += '\0';
  if (!cfg.fixture_path.empty()) material += read_bytes(cfg.resolve(cfg.fixture_path));
  material += '\0';
  material += cfg.to_json().dump();
  material += '\0';
  material += std::to_string(cfg.seed);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(material));
  return buf;
}

PipelineResult run_pipeline(const Instruction& instruction, const RunConfig& cfg, const PipelineOptions& opts) {
  const std::unique_ptr<Clock> clock = make_clock(cfg.clock_kind());
  memory::MemoryStore mem(compute_run_id(instruction, cfg), clock.get());
  StageRunner run(mem, *clock);

  auto export_bundle = [&] {
    if (opts.out_dir.empty()) return;
    std::filesystem::create_directories(opts.out_dir);
    memory::export_run_bundle(mem.bundle(), opts.out_dir / "bundle.json");
  };

  try {
    std::shared_ptr<llm::Backend> backend = opts.backend ? opts.backend : make_backend(cfg);
    llm::LlmClient client(backend, cfg.rate_card, clock.get());
    const catalog::Catalog& cat = catalog::Catalog::builtin();
    AgentContext ctx{client, mem, cat, clock.get(), cfg.reprompt};

    mem.put("engine", "config", cfg.to_json());
    mem.put("engine", "seed", cfg.seed);
    mem.put("engine", "rate_card", cfg.rate_card.to_json());
    mem.put("engine", "backend", backend->id());
    mem.put("engine", "clock", cfg.clock_kind());

    run.begin("manager");
    run.op("extract_task_plan");
    const TaskPlan plan = extract_task_plan(ctx, instruction);
    run.op("select_instance");
    const Instance instance = select_instance(ctx, plan);
    run.end();

    run.begin("data");
    run.op("load_dataset");
    engine::Dataset dataset = load_config_dataset(cfg);
    const std::string kind = engine::dataset_kind(dataset);
    if (kind != to_string(plan.task_level))
      throw Error(ErrorCode::DatasetMismatch,
                  "configured dataset is " + kind + "-level but the task is " + to_string(plan.task_level) + "-level");
    run.op("select_feature_engineering");
    const std::vector<std::string> transforms = select_feature_engineering(ctx, plan, instruction);
    run.op("prepare_dataset");
    dataset = prepare_dataset(ctx, std::move(dataset), transforms);
    run.end();

    run.begin("configuration");
    run.op("select_modules");
    const std::vector<std::string> modules = select_modules(ctx, plan, instance);
    run.op("assemble_search_space");
    SpaceOptions sopts;
    sopts.num_blocks = cfg.num_blocks;
    sopts.epochs = cfg.epochs;
    sopts.hidden_dim = cfg.hidden_dim;
    if (!opts.out_dir.empty()) {
      std::filesystem::create_directories(opts.out_dir);
      sopts.space_file = opts.out_dir / "space.json";
    }
    const SearchSpace space = assemble_search_space(ctx, plan, instance, modules, sopts);
    run.op("select_algorithm");
    const AlgorithmChoice choice = select_algorithm(ctx, space, instruction, plan);
    run.end();

    run.begin("searching");
    run.op("run_search_stage");
    SearchStageOptions search_opts;
    search_opts.budget = cfg.search_budget;
    search_opts.diff_steps = cfg.diff_steps;
    search_opts.seed = cfg.seed;
    search_opts.test_fold = cfg.test_fold;
    search_opts.space_file = "space.json";
    search_opts.transforms = transforms;
    const search::SearchLog slog = run_search_stage(ctx, space, choice.algorithm, dataset, search_opts);
    run.op("extract_searched_model");
    const Genotype genotype = extract_searched_model(ctx, slog);
    run.op("summarize_stage");
    summarize_stage(ctx, "searching", search_digest(slog));
    run.end();

    run.begin("tuning");
    run.op("run_tuning_stage");
    TuneStageOptions tune_opts;
    tune_opts.budget = cfg.tune_budget;
    tune_opts.seed = cfg.seed;
    tune_opts.test_fold = cfg.test_fold;
    tune_opts.final_repeats = cfg.final_repeats;
    const TuningResult tuned = run_tuning_stage(ctx, genotype, space, dataset, tune_opts);
    run.op("summarize_stage");
    summarize_stage(ctx, "tuning", tune_digest(tuned.log));
    run.end();

    run.begin("response");
    run.op("compose_response");
    RunSummary summary = compose_response(ctx, instruction);
    run.end(false);

    PipelineResult result{summary, mem.bundle()};
    if (!opts.out_dir.empty()) {
      export_bundle();
      write_text(opts.out_dir / "summary.json", summary.to_json().dump(2) + "\n");
      write_text(opts.out_dir / "summary.txt", summary.to_text());
      write_text(opts.out_dir / "search_log.jsonl", slog.to_jsonl());
      write_text(opts.out_dir / "tune_log.json", tuned.log.to_json().dump(2) + "\n");
    }
    return result;
  } catch (const StageFailure&) {
    throw;
  } catch (const Error& e) {
    mem.log_event(run.stage(), "stage_failed",
                  Json{{"operation", run.operation()}, {"error", to_string(e.code())}, {"detail", e.detail()}});
    try {
      export_bundle();
    } catch (const Error&) {
      // The original failure is the one worth reporting.
    }
    throw StageFailure(run.stage(), run.operation(), e);
  }
}

}  // namespace glagent::agents
