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

#include <cmath>
#include <sstream>

#include "glagent/error.hpp"
#include "glagent/search/search.hpp"

namespace glagent::search {

namespace {

// JSON has no infinities; failed trials carry null.
Json metric_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double metric_from(const Json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<double>();
}

}  // namespace

Json TrialRecord::to_json() const {
  Json j{{"trial_index", trial_index},
         {"genotype", genotype.to_json()},
         {"genotype_text", genotype.to_string()},
         {"hyperparams", hyperparams.to_json()},
         {"seed", seed},
         {"val_metric", metric_json(val_metric)},
         {"test_metric", metric_json(test_metric)},
         {"val_loss", metric_json(val_loss)},
         {"wall_ms", wall_ms},
         {"failed", failed}};
  if (!error.empty()) j["error"] = error;
  return j;
}

TrialRecord TrialRecord::from_json(const Json& j) {
  try {
    TrialRecord t;
    t.trial_index = j.at("trial_index").get<int>();
    t.genotype = Genotype::from_json(j.at("genotype"));
    t.hyperparams = engine::HyperParams::from_json(j.at("hyperparams"));
    t.seed = j.at("seed").get<std::uint64_t>();
    const double ninf = -std::numeric_limits<double>::infinity();
    t.val_metric = metric_from(j, "val_metric", ninf);
    t.test_metric = metric_from(j, "test_metric", ninf);
    t.val_loss = metric_from(j, "val_loss", std::numeric_limits<double>::quiet_NaN());
    t.wall_ms = j.value("wall_ms", 0.0);
    t.failed = j.value("failed", false);
    t.error = j.value("error", std::string());
    return t;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("trial record: ") + e.what());
  }
}

std::string SearchLog::to_jsonl() const {
  std::string out;
  for (const auto& t : trials) {
    Json j = t.to_json();
    j["algorithm"] = algorithm;
    j["space_digest"] = space_digest;
    out += j.dump();
    out += '\n';
  }
  return out;
}

SearchLog SearchLog::from_jsonl(const std::string& text) {
  SearchLog log;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, std::string("search log line: ") + e.what());
    }
    log.algorithm = j.value("algorithm", log.algorithm);
    log.space_digest = j.value("space_digest", log.space_digest);
    log.trials.push_back(TrialRecord::from_json(j));
  }
  return log;
}

Json SearchLog::to_json() const {
  Json trials_json = Json::array();
  for (const auto& t : trials) trials_json.push_back(t.to_json());
  return Json{{"algorithm", algorithm}, {"space_digest", space_digest}, {"trials", trials_json},
              {"extras", extras}};
}

SearchLog SearchLog::from_json(const Json& j) {
  SearchLog log;
  try {
    log.algorithm = j.at("algorithm").get<std::string>();
    log.space_digest = j.at("space_digest").get<std::string>();
    for (const Json& t : j.at("trials")) log.trials.push_back(TrialRecord::from_json(t));
    log.extras = j.value("extras", Json::object());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("search log: ") + e.what());
  }
  return log;
}

bool ranks_above(const TrialRecord& a, const TrialRecord& b) {
  if (a.val_metric != b.val_metric) return a.val_metric > b.val_metric;
  return std::isfinite(a.val_loss) && std::isfinite(b.val_loss) && a.val_loss < b.val_loss;
}

std::size_t best_trial_index(const SearchLog& log) {
  if (log.trials.empty()) throw Error(ErrorCode::EmptyLog, "search log has no trials");
  std::size_t best = 0;
  for (std::size_t i = 1; i < log.trials.size(); ++i)
    if (ranks_above(log.trials[i], log.trials[best])) best = i;
  return best;
}

}  // namespace glagent::search
