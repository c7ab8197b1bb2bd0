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

// Exercises the shared library through its C header only.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "glagent/glagent.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

fs::path src(const std::string& rel) { return fs::path(GLAGENT_SOURCE_DIR) / rel; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("glagent_capi_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path small_config(const fs::path& dir) {
  Json j = Json::parse(slurp(src("data/configs/sbm_node.json")));
  j["fixture_path"] = (src("data/configs") / j.at("fixture_path").get<std::string>()).lexically_normal().string();
  j["search_budget"] = 2;
  j["tune_budget"] = 2;
  j["epochs"] = 20;
  j["hidden_dim"] = 8;
  j["final_repeats"] = 1;
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

class CApi : public ::testing::Test {
 protected:
  void SetUp() override { ctx = glagent_context_create(); }
  void TearDown() override { glagent_context_destroy(ctx); }
  glagent_context* ctx = nullptr;
};

TEST_F(CApi, NullHandlesAndOptions) {
  EXPECT_EQ(glagent_run(nullptr, "{}"), GLAGENT_INVALID_ARGUMENT);
  EXPECT_STREQ(glagent_last_error(nullptr), "");
  EXPECT_STREQ(glagent_result_text(nullptr), "");
  EXPECT_EQ(glagent_run(ctx, nullptr), GLAGENT_INVALID_ARGUMENT);
  EXPECT_STREQ(glagent_last_error_kind(ctx), "InvalidConfig");
  EXPECT_EQ(glagent_run(ctx, "[1,2]"), GLAGENT_INVALID_ARGUMENT);
  EXPECT_EQ(glagent_run(ctx, "not json"), GLAGENT_INVALID_ARGUMENT);
  EXPECT_EQ(glagent_run(ctx, "{\"config\": \"x\"}"), GLAGENT_INVALID_ARGUMENT);
  EXPECT_NE(std::string(glagent_last_error(ctx)).find("instruction"), std::string::npos);
  EXPECT_STRNE(glagent_version(), "");
  glagent_context_destroy(nullptr);
}

TEST_F(CApi, RunThenEnumerateTheWrittenSpace) {
  const fs::path dir = fresh_dir("run");
  const Json o{{"instruction", src("data/instructions/sbm_node.txt").string()},
               {"config", small_config(dir).string()},
               {"out", (dir / "out").string()}};
  ASSERT_EQ(glagent_run(ctx, o.dump().c_str()), GLAGENT_OK) << glagent_last_error(ctx);
  EXPECT_STREQ(glagent_failed_stage(ctx), "");
  const Json summary = Json::parse(glagent_result_json(ctx));
  EXPECT_EQ(summary, Json::parse(slurp(dir / "out" / "summary.json")));
  EXPECT_NE(std::string(glagent_result_text(ctx)).find("Resource usage"), std::string::npos);

  const Json e{{"space", (dir / "out" / "space.json").string()}};
  ASSERT_EQ(glagent_enumerate(ctx, e.dump().c_str()), GLAGENT_OK) << glagent_last_error(ctx);
  const Json listing = Json::parse(glagent_result_json(ctx));
  const std::string text = glagent_result_text(ctx);
  EXPECT_EQ(text.rfind("# " + std::to_string(listing.at("count").get<int>()) + " genotypes\n", 0), 0u);
  EXPECT_EQ(listing.at("genotypes").size(), listing.at("count").get<std::size_t>());

  const Json tight{{"space", (dir / "out" / "space.json").string()}, {"limit", 1}};
  EXPECT_EQ(glagent_enumerate(ctx, tight.dump().c_str()), GLAGENT_SPACE_TOO_LARGE);
  EXPECT_STREQ(glagent_last_error_kind(ctx), "SpaceTooLarge");

  ASSERT_EQ(glagent_cost_report(ctx, (dir / "out" / "bundle.json").string().c_str()), GLAGENT_OK);
  EXPECT_EQ(Json::parse(glagent_result_json(ctx)).at("rows").size(), 6u);
  EXPECT_STREQ(glagent_warnings(ctx), "");
}

TEST_F(CApi, StageFailureNamesStageAndOperation) {
  const fs::path dir = fresh_dir("stage");
  const Json o{{"instruction", src("data/instructions/environment_network.txt").string()},
               {"config", small_config(dir).string()},
               {"fixtures", src("data/fixtures/manager_rows.json").string()},
               {"out", (dir / "out").string()}};
  EXPECT_EQ(glagent_run(ctx, o.dump().c_str()), GLAGENT_STAGE_FAILURE);
  EXPECT_STREQ(glagent_failed_stage(ctx), "manager/select_instance");
  EXPECT_STREQ(glagent_last_error_kind(ctx), "UnsupportedTask");
  EXPECT_EQ(std::string(glagent_last_error(ctx)).find("manager/select_instance"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "bundle.json"));

  // State resets on the next call.
  EXPECT_EQ(glagent_cost_report(ctx, (dir / "out" / "bundle.json").string().c_str()), GLAGENT_OK);
  EXPECT_STREQ(glagent_failed_stage(ctx), "");
  EXPECT_STREQ(glagent_last_error(ctx), "");
}

TEST_F(CApi, MissingBundleIsInputError) {
  EXPECT_EQ(glagent_cost_report(ctx, "/nonexistent/bundle.json"), GLAGENT_INVALID_ARGUMENT);
  EXPECT_STREQ(glagent_last_error_kind(ctx), "IoFailure");
  EXPECT_EQ(glagent_cost_report(ctx, nullptr), GLAGENT_INVALID_ARGUMENT);
}

}  // namespace
