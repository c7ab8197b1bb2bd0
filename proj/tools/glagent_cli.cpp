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

// glagent command-line tool. Links only the C API.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "glagent/glagent.h"
#include "json.hpp"

namespace {

using Json = nlohmann::json;

constexpr int kExitBadInput = 2;
constexpr int kExitStage = 3;
constexpr int kExitSpaceTooLarge = 4;

int report(glagent_context* ctx, glagent_status st, bool as_json) {
  const char* warnings = glagent_warnings(ctx);
  if (*warnings) std::cerr << warnings;
  switch (st) {
    case GLAGENT_OK:
      std::cout << (as_json ? glagent_result_json(ctx) : glagent_result_text(ctx));
      if (as_json) std::cout << "\n";
      return 0;
    case GLAGENT_STAGE_FAILURE:
      std::cerr << "glagent: stage failed: " << glagent_failed_stage(ctx) << " [" << glagent_last_error_kind(ctx)
                << "] " << glagent_last_error(ctx) << "\n";
      return kExitStage;
    case GLAGENT_SPACE_TOO_LARGE:
      std::cerr << "glagent: " << glagent_last_error_kind(ctx) << ": " << glagent_last_error(ctx) << "\n";
      return kExitSpaceTooLarge;
    case GLAGENT_INVALID_ARGUMENT:
      std::cerr << "glagent: " << glagent_last_error_kind(ctx) << ": " << glagent_last_error(ctx) << "\n";
      return kExitBadInput;
    default:
      std::cerr << "glagent: " << glagent_last_error_kind(ctx) << ": " << glagent_last_error(ctx) << "\n";
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLM-agent driven graph learning pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(glagent_version()));
  bool as_json = false;
  app.add_flag("--json", as_json, "Print structured output instead of text");

  std::string instruction, config, backend, fixtures, out;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run the pipeline on one instruction");
  run->add_option("--instruction", instruction, "Instruction file")->required();
  run->add_option("--config", config, "Run config file")->required();
  auto* backend_opt = run->add_option("--backend", backend, "mock or http")->check(CLI::IsMember({"mock", "http"}));
  auto* fixtures_opt = run->add_option("--fixtures", fixtures, "Mock fixture file");
  auto* seed_opt = run->add_option("--seed", seed, "Seed");
  run->add_option("--out", out, "Output directory");

  std::string corpus, gold, bench_backend = "mock", bench_fixtures;
  bool paper_only = false;
  std::uint64_t bench_seed = 0;
  auto* bench = app.add_subcommand("bench-robustness", "Score agent outputs over an instruction corpus");
  bench->add_option("--corpus", corpus, "Corpus file")->required();
  bench->add_option("--gold", gold, "Gold label file")->required();
  bench->add_option("--backend", bench_backend, "mock or http")->check(CLI::IsMember({"mock", "http"}));
  bench->add_option("--fixtures", bench_fixtures, "Mock fixture file");
  bench->add_flag("--paper-only", paper_only, "Score only items with provenance=paper");
  bench->add_option("--seed", bench_seed, "Seed");

  std::string bundle;
  auto* cost = app.add_subcommand("cost-report", "Per-stage time, tokens and cost of a run");
  cost->add_option("--run", bundle, "Run bundle (bundle.json)")->required();

  std::string space, enum_config;
  std::uint64_t limit = 1u << 20;
  bool eval = false;
  auto* en = app.add_subcommand("enumerate", "List or evaluate every genotype of a space");
  en->add_option("--space", space, "Space file")->required();
  en->add_flag("--eval", eval, "Train every genotype and rank them");
  en->add_option("--config", enum_config, "Run config naming the dataset (with --eval)");
  en->add_option("--limit", limit, "Refuse spaces with more genotypes than this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }
  if (eval && enum_config.empty()) {
    std::cerr << "glagent: --eval needs --config\n";
    return kExitBadInput;
  }

  glagent_context* ctx = glagent_context_create();
  if (!ctx) return 1;
  glagent_status st = GLAGENT_ERROR;
  if (*run) {
    Json o{{"instruction", instruction}, {"config", config}};
    if (*backend_opt) o["backend"] = backend;
    if (*fixtures_opt) o["fixtures"] = fixtures;
    if (*seed_opt) o["seed"] = seed;
    if (!out.empty()) o["out"] = out;
    st = glagent_run(ctx, o.dump().c_str());
  } else if (*bench) {
    Json o{{"corpus", corpus}, {"gold", gold}, {"backend", bench_backend}, {"paper_only", paper_only},
           {"seed", bench_seed}};
    if (!bench_fixtures.empty()) o["fixtures"] = bench_fixtures;
    st = glagent_bench_robustness(ctx, o.dump().c_str());
  } else if (*cost) {
    st = glagent_cost_report(ctx, bundle.c_str());
  } else if (*en) {
    Json o{{"space", space}, {"limit", limit}, {"eval", eval}};
    if (!enum_config.empty()) o["config"] = enum_config;
    st = glagent_enumerate(ctx, o.dump().c_str());
  }
  const int code = report(ctx, st, as_json);
  if (st == GLAGENT_OK && *run && !out.empty()) std::cerr << "glagent: outputs written to " << out << "\n";
  glagent_context_destroy(ctx);
  return code;
}
