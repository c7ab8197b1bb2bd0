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

#include "glagent/glagent.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "glagent/agents/bench.hpp"
#include "glagent/agents/config.hpp"
#include "glagent/agents/cost_report.hpp"
#include "glagent/agents/pipeline.hpp"
#include "glagent/error.hpp"
#include "glagent/json.hpp"
#include "glagent/memory/memory_store.hpp"
#include "glagent/search/search.hpp"

struct glagent_context {
  std::string error;
  std::string error_kind;
  std::string failed_stage;
  std::string text;
  std::string json;
  std::string warnings;

  void reset() {
    error.clear();
    error_kind.clear();
    failed_stage.clear();
    text.clear();
    json.clear();
    warnings.clear();
  }
};

namespace {

using glagent::Error;
using glagent::ErrorCode;
using glagent::Json;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_options(const char* text) {
  if (!text) throw Error(ErrorCode::InvalidConfig, "options are null");
  try {
    Json j = Json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "options must be a JSON object");
    return j;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("options: ") + e.what());
  }
}

std::string required_string(const Json& o, const char* key) {
  if (!o.contains(key) || !o.at(key).is_string() || o.at(key).get<std::string>().empty())
    throw Error(ErrorCode::InvalidConfig, std::string("missing option '") + key + "'");
  return o.at(key).get<std::string>();
}

bool input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::IoFailure:
    case ErrorCode::SchemaViolation:
    case ErrorCode::InvalidConfig:
    case ErrorCode::CorruptBundle:
    case ErrorCode::InvalidParameter:
    case ErrorCode::InvalidEnumValue:
    case ErrorCode::InvalidGenotype:
    case ErrorCode::UnknownModule:
    case ErrorCode::DuplicateRule:
    case ErrorCode::MissingCredentials:
      return true;
    default:
      return false;
  }
}

glagent_status fail(glagent_context* ctx, const Error& e) {
  ctx->error = e.detail();
  ctx->error_kind = glagent::to_string(e.code());
  if (e.code() == ErrorCode::SpaceTooLarge) return GLAGENT_SPACE_TOO_LARGE;
  return input_error(e.code()) ? GLAGENT_INVALID_ARGUMENT : GLAGENT_ERROR;
}

template <typename F>
glagent_status guarded(glagent_context* ctx, F&& body) {
  if (!ctx) return GLAGENT_INVALID_ARGUMENT;
  ctx->reset();
  try {
    body();
    return GLAGENT_OK;
  } catch (const glagent::StageFailure& e) {
    ctx->failed_stage = e.stage() + "/" + e.operation();
    const std::string prefix = ctx->failed_stage + ": ";
    ctx->error = e.detail().rfind(prefix, 0) == 0 ? e.detail().substr(prefix.size()) : e.detail();
    ctx->error_kind = glagent::to_string(e.code());
    return GLAGENT_STAGE_FAILURE;
  } catch (const Error& e) {
    return fail(ctx, e);
  } catch (const std::filesystem::filesystem_error& e) {
    ctx->error = e.what();
    ctx->error_kind = "IoFailure";
    return GLAGENT_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    ctx->error = e.what();
    ctx->error_kind = "Internal";
    return GLAGENT_ERROR;
  }
}

std::shared_ptr<glagent::llm::Backend> backend_from(const Json& o, const std::filesystem::path& base) {
  const std::string kind = o.value("backend", std::string("mock"));
  if (kind == "http") return std::make_shared<glagent::llm::HttpBackend>(glagent::llm::HttpSettings::from_env());
  if (kind != "mock") throw Error(ErrorCode::InvalidConfig, "unknown backend '" + kind + "'");
  const std::filesystem::path f = base / required_string(o, "fixtures");
  return std::make_shared<glagent::llm::MockBackend>(glagent::llm::load_fixture_file(f));
}

}  // namespace

extern "C" {

glagent_context* glagent_context_create(void) { return new (std::nothrow) glagent_context(); }

void glagent_context_destroy(glagent_context* ctx) { delete ctx; }

const char* glagent_version(void) { return "0.3.0"; }

glagent_status glagent_run(glagent_context* ctx, const char* options_json) {
  return guarded(ctx, [&] {
    namespace fs = std::filesystem;
    const Json o = parse_options(options_json);
    const std::string config_path = required_string(o, "config");
    const std::string instruction_path = required_string(o, "instruction");
    glagent::agents::RunConfig cfg = glagent::agents::RunConfig::load(config_path);
    const glagent::agents::Instruction instruction = glagent::agents::load_instruction(instruction_path);
    if (o.contains("backend")) cfg.backend = o.at("backend").get<std::string>();
    if (o.contains("fixtures")) {
      // Stored relative to the config so the bundle does not depend on the cwd.
      const fs::path abs = fs::absolute(o.at("fixtures").get<std::string>());
      cfg.fixture_path = fs::proximate(abs, fs::absolute(cfg.base_dir)).generic_string();
    }
    if (o.contains("seed")) cfg.seed = o.at("seed").get<std::uint64_t>();

    glagent::agents::PipelineOptions popts;
    if (o.contains("out")) popts.out_dir = o.at("out").get<std::string>();
    popts.backend = glagent::agents::make_backend(cfg);
    const auto result = glagent::agents::run_pipeline(instruction, cfg, popts);
    ctx->text = result.summary.to_text();
    ctx->json = result.summary.to_json().dump(2);
  });
}

glagent_status glagent_bench_robustness(glagent_context* ctx, const char* options_json) {
  return guarded(ctx, [&] {
    const Json o = parse_options(options_json);
    const auto corpus = glagent::agents::parse_corpus(read_file(required_string(o, "corpus")));
    Json gold_json;
    try {
      gold_json = Json::parse(read_file(required_string(o, "gold")));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, std::string("gold: ") + e.what());
    }
    const auto gold = glagent::agents::parse_gold(gold_json);
    glagent::agents::BenchOptions bopts;
    bopts.paper_only = o.value("paper_only", false);
    bopts.seed = o.value("seed", std::uint64_t{0});
    const auto report = glagent::agents::bench_robustness(corpus, gold, backend_from(o, {}), bopts);
    ctx->text = report.to_text();
    ctx->json = report.to_json().dump(2);
  });
}

glagent_status glagent_cost_report(glagent_context* ctx, const char* bundle_path) {
  return guarded(ctx, [&] {
    if (!bundle_path || !*bundle_path) throw Error(ErrorCode::InvalidConfig, "no bundle path");
    const auto report = glagent::agents::cost_report(glagent::memory::load_run_bundle(bundle_path));
    ctx->text = report.to_text();
    ctx->json = report.to_json().dump(2);
    for (const auto& w : report.warnings) ctx->warnings += w + "\n";
  });
}

glagent_status glagent_enumerate(glagent_context* ctx, const char* options_json) {
  return guarded(ctx, [&] {
    namespace search = glagent::search;
    const Json o = parse_options(options_json);
    glagent::SearchSpace space;
    try {
      space = glagent::SearchSpace::from_json(Json::parse(read_file(required_string(o, "space"))));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, std::string("space: ") + e.what());
    }
    const std::uint64_t limit = o.value("limit", std::uint64_t{1} << 20);
    const std::vector<glagent::Genotype> all = search::enumerate_genotypes(space, limit);

    std::ostringstream text;
    Json j{{"count", all.size()}, {"space_digest", space.digest()}};
    if (!o.value("eval", false)) {
      text << "# " << all.size() << " genotypes\n";
      Json list = Json::array();
      for (const auto& g : all) {
        text << g.to_string() << "\n";
        list.push_back(g.to_string());
      }
      j["genotypes"] = list;
    } else {
      const auto cfg = glagent::agents::RunConfig::load(required_string(o, "config"));
      const glagent::engine::Dataset d = glagent::agents::load_config_dataset(cfg);
      const auto eval = search::make_engine_eval(d, search::search_hyperparams(space), cfg.test_fold);
      const search::SearchLog log = search::enumerate_and_evaluate(space, limit, eval, cfg.seed);
      std::vector<std::size_t> order(log.trials.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return search::ranks_above(log.trials[a], log.trials[b]);
      });
      text << "# " << all.size() << " genotypes ranked by validation metric\n";
      Json ranking = Json::array();
      char line[96];
      for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& t = log.trials[order[r]];
        std::snprintf(line, sizeof line, "%3zu  #%-4d val %.6f  test %.6f  ", r + 1, t.trial_index, t.val_metric,
                      t.test_metric);
        text << line << t.genotype.to_string() << (t.failed ? "  (failed)" : "") << "\n";
        ranking.push_back(t.to_json());
      }
      j["ranking"] = ranking;
    }
    ctx->text = text.str();
    ctx->json = j.dump(2);
  });
}

const char* glagent_last_error(const glagent_context* ctx) { return ctx ? ctx->error.c_str() : ""; }
const char* glagent_last_error_kind(const glagent_context* ctx) { return ctx ? ctx->error_kind.c_str() : ""; }
const char* glagent_failed_stage(const glagent_context* ctx) { return ctx ? ctx->failed_stage.c_str() : ""; }
const char* glagent_result_text(const glagent_context* ctx) { return ctx ? ctx->text.c_str() : ""; }
const char* glagent_result_json(const glagent_context* ctx) { return ctx ? ctx->json.c_str() : ""; }
const char* glagent_warnings(const glagent_context* ctx) { return ctx ? ctx->warnings.c_str() : ""; }

}  // extern "C"
