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

#include "test_util.hpp"

#include <fstream>
#include <sstream>

namespace glagent::testing {

std::filesystem::path source_path(const std::string& rel) { return std::filesystem::path(GLAGENT_SOURCE_DIR) / rel; }

std::filesystem::path test_data(const std::string& rel) { return std::filesystem::path(GLAGENT_TEST_DATA) / rel; }

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("glagent_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

llm::FixtureRule rule(const std::string& template_id, const std::string& response, std::optional<std::string> contains) {
  llm::FixtureRule r;
  r.match_template_id = template_id;
  r.match_contains = std::move(contains);
  r.response_text = response;
  return r;
}

AgentHarness::AgentHarness(std::vector<llm::FixtureRule> rules, bool reprompt)
    : backend(std::make_shared<llm::MockBackend>(std::move(rules))) {
  init(reprompt);
}

AgentHarness::AgentHarness(const std::filesystem::path& fixture_file)
    : backend(std::make_shared<llm::MockBackend>(llm::load_fixture_file(fixture_file))) {
  init(false);
}

void AgentHarness::init(bool reprompt) {
  memory = std::make_unique<memory::MemoryStore>("test-run", &clock);
  client = std::make_unique<llm::LlmClient>(backend, llm::RateCard{}, &clock);
  ctx = std::make_unique<agents::AgentContext>(
      agents::AgentContext{*client, *memory, catalog::Catalog::builtin(), &clock, reprompt});
}

engine::NodeGraph desk_sbm(double feature_scale, std::uint64_t seed) {
  engine::SbmParams p;
  p.n = 200;
  p.num_classes = 4;
  p.p_in = 0.1;
  p.p_out = 0.01;
  p.feature_dim = 8;
  p.feature_scale = feature_scale;
  p.seed = seed;
  return engine::generate_sbm(p);
}

}  // namespace glagent::testing
