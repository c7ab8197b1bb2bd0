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

#include "glagent/llm/prompts.hpp"

#include <algorithm>

#include "glagent/error.hpp"

namespace glagent::llm {

namespace {

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Calls on_text for literal runs and on_name for each {name}. A '{' that does
// not open a well-formed name is literal text.
template <typename Text, typename Name>
void scan(const std::string& body, Text on_text, Name on_name) {
  std::size_t i = 0;
  while (i < body.size()) {
    const char c = body[i];
    if (c == '{' && i + 1 < body.size() && body[i + 1] == '{') {
      on_text("{");
      i += 2;
      continue;
    }
    if (c == '}' && i + 1 < body.size() && body[i + 1] == '}') {
      on_text("}");
      i += 2;
      continue;
    }
    if (c == '{') {
      std::size_t j = i + 1;
      while (j < body.size() && is_name_char(body[j])) ++j;
      if (j > i + 1 && j < body.size() && body[j] == '}') {
        on_name(body.substr(i + 1, j - i - 1));
        i = j + 1;
        continue;
      }
    }
    on_text(std::string(1, c));
    ++i;
  }
}

PromptTemplate make(std::string id, std::string profile, std::string objective, std::string functions,
                    std::string expertise) {
  PromptTemplate t;
  t.template_id = std::move(id);
  t.sections = {{"Profile", std::move(profile)},
                {"Objective", std::move(objective)},
                {"Functions", std::move(functions)},
                {"Human Expertise", std::move(expertise)}};
  return t;
}

std::vector<PromptTemplate> builtin_templates() {
  std::vector<PromptTemplate> out;

  out.push_back(make(
      "manager",
      "You are a Graph Learning Specialist. You read requests written by people who want a model "
      "trained on their graph data and turn each request into a compact task plan.",
      "Read the request below and fill in the task plan fields.\n"
      "Request: {user_req}",
      "Reply with two brace blocks. The first holds your reasoning:\n"
      "{{'Learning_tasks_on_graph_reason': '...', 'Learning_task_types_reason': '...', "
      "'Evaluation_metric_reason': '...'}}\n"
      "The second holds the plan:\n"
      "{{'Data': '<dataset name or path>', 'Learning_tasks_on_graph': 'node-level | graph-level | link-level', "
      "'Learning_task_types': 'classification | regression | ranking', "
      "'Evaluation_metric': 'accuracy | R-squared | Recall@K', 'Preference': '<operation named by the user or None>'}}\n"
      "Add a 'Constraints' key only when the request limits memory, excludes operations or asks for speed: "
      "{{'max_memory_class': 'light | heavy', 'exclude_ops': [...], 'efficiency': 'none | prefer_fast'}}.",
      "Predicting something about single nodes is node-level; about whole graphs is graph-level; "
      "recommending items to users or predicting links is link-level. Categories mean classification, "
      "continuous targets mean regression, recommendation means ranking. Classification is scored by accuracy, "
      "regression by R-squared, ranking by Recall@20 unless the user names another K."));

  out.push_back(make(
      "data",
      "You are a Graph Learning Specialist who prepares graph data before training. You know the "
      "feature engineering transforms listed below and when each one helps.",
      "Choose between one and three transforms for the dataset in this task.\n"
      "Request: {user_req}\n"
      "Task plan: {task_plan}",
      "Available transforms:\n{content}\n"
      "Reply with {{\"feature_engineering_reason\": \"...\"}} followed by "
      "{{\"feature_engineering\": [\"<transform>\", ...]}}. Use only names from the list.",
      "Message passing over citation-like graphs benefits from self loops. Interaction or social graphs "
      "stored one direction at a time should be made undirected. Raw count features can be row-normalized."));

  out.push_back(make(
      "configuration.modules",
      "You are a Graph Learning Specialist who configures architecture search spaces from library "
      "documentation.",
      "Pick the modules that make up the search space for this task.\n"
      "Task plan: {task_plan}\n"
      "Backbone: {instance}",
      "Modules the backbone offers, with their documented operations:\n{content}\n"
      "Reply with {{'modules': ['<module>', ...], 'reason': '...'}} using the module names exactly as listed.",
      "Node tasks search aggregation, selection and fusion. Graph tasks also need a readout and may list "
      "pooling. Ranking tasks describe both towers: message function, aggregation, layer and component "
      "counts, their combinations and the interaction function."));

  out.push_back(make(
      "configuration.algorithm",
      "You are a Graph Learning Specialist who decides how an architecture search space should be explored.",
      "Identify the efficiency requirement of the request and recommend a search algorithm.\n"
      "Request: {user_req}\n"
      "Task plan: {task_plan}\n"
      "Search space: {space}",
      "Algorithms:\n{content}\n"
      "Reply with {{'efficiency': 'none | prefer_fast', 'reason': '...'}} and "
      "{{'algorithm': 'Random Search | Differentiable Search'}}.",
      "Differentiable search is fast but needs every decision to be continuously mixable: coarsening "
      "pooling and discrete sizes such as layer or component counts rule it out. Random search always applies."));

  out.push_back(make(
      "searching.summary",
      "You are a Graph Learning Specialist who runs architecture search and reports what it found.",
      "Summarize the search run described by this digest for the user.\n"
      "Digest: {digest}",
      "Reply in two or three sentences. Name the best architecture and its validation score.",
      "Mention failed trials when there are any."));

  out.push_back(make(
      "tuning.summary",
      "You are a Graph Learning Specialist who tunes hyperparameters of a searched architecture.",
      "Summarize the tuning run described by this digest for the user.\n"
      "Digest: {digest}",
      "Reply in two or three sentences. Name the chosen learning rate, weight decay and dropout.",
      "Point out when the best trial was the first one sampled."));

  out.push_back(make(
      "response",
      "You are a Graph Learning Specialist who writes the final report of an automated graph learning run.",
      "Write a short report for the user.\n"
      "Request: {user_req}\n"
      "Results: {summary}",
      "Cover the prediction results, the searched architecture and the optimized hyperparameters, "
      "in plain prose.",
      "Keep numbers as given. Do not invent results that are not in the input."));

  out.push_back(make(
      "baseline.llm_gnn",
      "You are an expert on graph learning.",
      "Describe the dataset {data_name} used in the task {task}, then suggest one GNN likely to do well on it.{addenda}",
      "Start the answer with 'GNN: <number of layers>-layer <stacking | concatenation> <operation>.' and "
      "end it with 'Hyper-parameters: {{hidden: <int>, dropout: <float>, lr: <float>, wd: <float>}}'.",
      "Design dimensions to consider: aggregation operation, activation, number of layers, skip "
      "connections, layer combination and training hyperparameters."));

  return out;
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> names;
  for (const auto& [heading, body] : sections)
    scan(body, [](const std::string&) {},
         [&](const std::string& n) {
           if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
         });
  return names;
}

std::string substitute(const std::string& body, const Bindings& bindings) {
  std::string out;
  out.reserve(body.size());
  scan(body, [&](const std::string& s) { out += s; },
       [&](const std::string& n) {
         auto it = bindings.find(n);
         if (it == bindings.end()) throw Error(ErrorCode::UnboundPlaceholder, n);
         out += it->second;
       });
  return out;
}

PromptRegistry PromptRegistry::with_defaults() {
  PromptRegistry r;
  for (auto& t : builtin_templates()) r.add(std::move(t));
  return r;
}

void PromptRegistry::add(PromptTemplate t) {
  const std::string id = t.template_id;
  templates_[id] = std::move(t);
}

const PromptTemplate& PromptRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw Error(ErrorCode::UnknownTemplate, id);
  return it->second;
}

std::vector<std::string> PromptRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, t] : templates_) out.push_back(id);
  return out;
}

std::string PromptRegistry::render(const std::string& id, const Bindings& bindings) const {
  const PromptTemplate& t = get(id);
  std::string out;
  for (const auto& [heading, body] : t.sections) {
    out += "## " + heading + "\n";
    out += substitute(body, bindings);
    out += "\n";
  }
  return out;
}

const PromptRegistry& default_registry() {
  static const PromptRegistry registry = PromptRegistry::with_defaults();
  return registry;
}

std::string render_prompt(const std::string& template_id, const Bindings& bindings) {
  return default_registry().render(template_id, bindings);
}

std::string stage_of(const std::string& template_id) {
  return template_id.substr(0, template_id.find('.'));
}

}  // namespace glagent::llm
