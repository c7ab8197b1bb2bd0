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

#include "glagent/agents/task_plan.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "glagent/error.hpp"

namespace glagent::agents {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Lower case with spaces, dashes and underscores collapsed to '_'.
std::string canon(const std::string& s) {
  std::string out;
  for (char c : trim(s)) {
    const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l == ' ' || l == '-' || l == '_') {
      if (!out.empty() && out.back() != '_') out += '_';
    } else {
      out += l;
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string as_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::Simple: return "simple";
    case Variant::Complex: return "complex";
    case Variant::Misleading: return "misleading";
    case Variant::Unlabeled: return "unlabeled";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  const std::string c = canon(s);
  if (c == "simple") return Variant::Simple;
  if (c == "complex") return Variant::Complex;
  if (c == "misleading") return Variant::Misleading;
  if (c == "unlabeled" || c.empty()) return Variant::Unlabeled;
  throw Error(ErrorCode::InvalidEnumValue, "variant: " + s);
}

Instruction parse_instruction(const std::string& text) {
  Instruction ins;
  std::istringstream in(text);
  std::string line;
  std::string body;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header && line.rfind("#id:", 0) == 0) {
      ins.corpus_id = trim(line.substr(4));
      continue;
    }
    if (header && line.rfind("#variant:", 0) == 0) {
      ins.variant = variant_from_string(line.substr(9));
      continue;
    }
    header = false;
    if (!body.empty()) body += '\n';
    body += line;
  }
  ins.raw_text = trim(body);
  if (ins.raw_text.empty()) throw Error(ErrorCode::InvalidParameter, "instruction text is empty");
  return ins;
}

Instruction load_instruction(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read instruction file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instruction(ss.str());
}

std::vector<Instruction> parse_corpus(const std::string& text) {
  std::vector<Instruction> out;
  std::istringstream in(text);
  std::string line, chunk;
  auto flush = [&] {
    if (!trim(chunk).empty()) out.push_back(parse_instruction(chunk));
    chunk.clear();
  };
  while (std::getline(in, line)) {
    if (trim(line) == "---") {
      flush();
      continue;
    }
    chunk += line;
    chunk += '\n';
  }
  flush();
  return out;
}

const char* to_string(TaskType t) noexcept {
  switch (t) {
    case TaskType::Classification: return "classification";
    case TaskType::Regression: return "regression";
    case TaskType::Ranking: return "ranking";
  }
  return "?";
}

TaskLevel normalize_level(const std::string& raw) {
  const std::string c = canon(raw);
  if (c == "node" || c == "node_level" || c == "node_classification") return TaskLevel::Node;
  if (c == "graph" || c == "graph_level" || c == "graph_classification") return TaskLevel::Graph;
  if (c == "link" || c == "link_level" || c == "edge" || c == "edge_level" || c == "link_prediction" ||
      c == "item_ranking")
    return TaskLevel::Link;
  throw Error(ErrorCode::InvalidEnumValue, std::string(plan_keys::kLevel) + ": " + raw);
}

TaskType normalize_type(const std::string& raw) {
  const std::string c = canon(raw);
  if (c == "classification" || c == "node_classification" || c == "graph_classification") return TaskType::Classification;
  if (c == "regression") return TaskType::Regression;
  if (c == "ranking" || c == "item_ranking" || c == "recommendation" || c == "link_prediction") return TaskType::Ranking;
  throw Error(ErrorCode::InvalidEnumValue, std::string(plan_keys::kType) + ": " + raw);
}

Metric normalize_metric(const std::string& raw) {
  std::string c = canon(raw);
  if (c == "accuracy" || c == "acc") return Metric::accuracy();
  if (c == "r_squared" || c == "r2" || c == "r^2" || c == "rsquared" || c == "r_square") return Metric::r_squared();
  c.erase(std::remove(c.begin(), c.end(), '_'), c.end());
  for (const char* prefix : {"recall@", "recallat"}) {
    const std::string p = prefix;
    if (c.rfind(p, 0) == 0) {
      const std::string k = c.substr(p.size());
      if (k.empty() || k == "k") return Metric::recall_at(20);
      if (std::all_of(k.begin(), k.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        const int kv = std::stoi(k);
        if (kv > 0) return Metric::recall_at(kv);
      }
    }
  }
  if (c == "recall") return Metric::recall_at(20);
  throw Error(ErrorCode::InvalidEnumValue, std::string(plan_keys::kMetric) + ": " + raw);
}

std::optional<std::string> normalize_preference(const std::string& raw) {
  const std::string t = trim(raw);
  const std::string c = canon(t);
  if (c.empty() || c == "none" || c == "null" || c == "n/a" || c == "na" || c == "no" || c == "no_preference")
    return std::nullopt;
  return t;
}

Metric metric_for(TaskType t) {
  switch (t) {
    case TaskType::Classification: return Metric::accuracy();
    case TaskType::Regression: return Metric::r_squared();
    case TaskType::Ranking: return Metric::recall_at(20);
  }
  return Metric::accuracy();
}

bool TaskPlan::same_fields(const TaskPlan& o) const { return matching_fields(o) == 5; }

int TaskPlan::matching_fields(const TaskPlan& o) const {
  return (data_name == o.data_name) + (task_level == o.task_level) + (task_type == o.task_type) +
         (metric == o.metric) + (preference == o.preference);
}

Json TaskPlan::to_json() const {
  Json j{{"data_name", data_name},
         {"task_level", to_string(task_level)},
         {"task_type", to_string(task_type)},
         {"metric", metric.to_string()},
         {"preference", preference ? Json(*preference) : Json(nullptr)},
         {"constraints", constraints.to_json()},
         {"reasons", reasons}};
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

TaskPlan TaskPlan::from_json(const Json& j) {
  try {
    TaskPlan p;
    p.data_name = j.at("data_name").get<std::string>();
    p.task_level = level_from_string(j.at("task_level").get<std::string>());
    p.task_type = normalize_type(j.at("task_type").get<std::string>());
    p.metric = Metric::parse(j.at("metric").get<std::string>());
    if (j.contains("preference") && !j.at("preference").is_null())
      p.preference = normalize_preference(j.at("preference").get<std::string>());
    if (j.contains("constraints")) p.constraints = catalog::ConstraintSet::from_json(j.at("constraints"));
    if (j.contains("reasons")) p.reasons = j.at("reasons").get<std::map<std::string, std::string>>();
    if (j.contains("notes")) p.notes = j.at("notes").get<std::vector<std::string>>();
    return p;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("task plan: ") + e.what());
  }
}

Json TaskPlan::wire_fields() const {
  std::string metric_text = metric.kind == Metric::Kind::Accuracy   ? "accuracy"
                            : metric.kind == Metric::Kind::RSquared ? "R-squared"
                                                                    : "Recall@" + std::to_string(metric.k);
  Json j{{plan_keys::kData, data_name},
         {plan_keys::kLevel, std::string(to_string(task_level)) + "-level"},
         {plan_keys::kType, to_string(task_type)},
         {plan_keys::kMetric, metric_text},
         {plan_keys::kPreference, preference ? *preference : std::string("None")}};
  if (!constraints.empty()) j[plan_keys::kConstraints] = constraints.to_json();
  return j;
}

TaskPlan task_plan_from_fields(const Json& f) {
  TaskPlan p;
  p.data_name = trim(as_text(f.at(plan_keys::kData)));
  p.task_level = normalize_level(as_text(f.at(plan_keys::kLevel)));
  p.task_type = normalize_type(as_text(f.at(plan_keys::kType)));
  const Metric raw_metric = normalize_metric(as_text(f.at(plan_keys::kMetric)));
  const Metric expected = metric_for(p.task_type);
  if (raw_metric.kind != expected.kind) {
    p.metric = expected;
    p.notes.push_back("metric " + raw_metric.to_string() + " conflicts with task type " + to_string(p.task_type) +
                      "; using " + expected.to_string());
  } else {
    p.metric = raw_metric;
  }
  p.preference = normalize_preference(as_text(f.at(plan_keys::kPreference)));
  if (f.contains(plan_keys::kConstraints)) p.constraints = catalog::ConstraintSet::from_json(f.at(plan_keys::kConstraints));
  for (auto it = f.begin(); it != f.end(); ++it) {
    const std::string& k = it.key();
    if (k.size() > 7 && k.compare(k.size() - 7, 7, "_reason") == 0) p.reasons[k.substr(0, k.size() - 7)] = as_text(it.value());
  }
  return p;
}

}  // namespace glagent::agents
