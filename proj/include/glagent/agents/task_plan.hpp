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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glagent/catalog/catalog.hpp"
#include "glagent/genotype.hpp"
#include "glagent/json.hpp"
#include "glagent/metric.hpp"

namespace glagent::agents {

enum class Variant { Simple, Complex, Misleading, Unlabeled };
const char* to_string(Variant v) noexcept;
Variant variant_from_string(const std::string& s);

struct Instruction {
  std::string raw_text;
  std::optional<std::string> corpus_id;
  Variant variant = Variant::Unlabeled;
};

// Reads "#id:" and "#variant:" header lines, then the text. InvalidParameter
// when the text is empty after trimming.
Instruction parse_instruction(const std::string& text);
Instruction load_instruction(const std::string& path);

// A corpus file holds instructions separated by lines containing only "---".
std::vector<Instruction> parse_corpus(const std::string& text);

enum class TaskType { Classification, Regression, Ranking };
const char* to_string(TaskType t) noexcept;

// Keys of the manager's structured output.
namespace plan_keys {
inline constexpr const char* kData = "Data";
inline constexpr const char* kLevel = "Learning_tasks_on_graph";
inline constexpr const char* kType = "Learning_task_types";
inline constexpr const char* kMetric = "Evaluation_metric";
inline constexpr const char* kPreference = "Preference";
inline constexpr const char* kConstraints = "Constraints";
}  // namespace plan_keys

// Field normalization. Each throws InvalidEnumValue("<field>: <raw>").
TaskLevel normalize_level(const std::string& raw);
TaskType normalize_type(const std::string& raw);
Metric normalize_metric(const std::string& raw);
// "None", "none", "" and similar mean no preference.
std::optional<std::string> normalize_preference(const std::string& raw);

Metric metric_for(TaskType t);

struct TaskPlan {
  std::string data_name;
  TaskLevel task_level = TaskLevel::Node;
  TaskType task_type = TaskType::Classification;
  Metric metric = Metric::accuracy();
  std::optional<std::string> preference;
  catalog::ConstraintSet constraints;
  std::map<std::string, std::string> reasons;
  // Normalization notes, e.g. a metric replaced to match the task type.
  std::vector<std::string> notes;

  // Compares the five extracted fields (data, level, type, metric, preference).
  bool same_fields(const TaskPlan& other) const;
  // Number of the five fields equal to other's.
  int matching_fields(const TaskPlan& other) const;

  Json to_json() const;
  static TaskPlan from_json(const Json& j);
  // The plan in the manager's output vocabulary, as shown to later agents.
  Json wire_fields() const;
};

// Builds a plan from parsed manager output (the five keys, optional
// Constraints, optional *_reason keys). Enforces metric/type consistency by
// replacing a conflicting metric and noting it.
TaskPlan task_plan_from_fields(const Json& fields);

}  // namespace glagent::agents
