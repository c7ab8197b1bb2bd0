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
#include <string>
#include <utility>
#include <vector>

namespace glagent::llm {

// Sections render as "## <heading>\n<body>\n". Bodies may hold {name}
// placeholders; {{ and }} produce literal braces.
struct PromptTemplate {
  std::string template_id;
  std::vector<std::pair<std::string, std::string>> sections;

  // Placeholder names in order of first appearance.
  std::vector<std::string> placeholders() const;
};

using Bindings = std::map<std::string, std::string>;

class PromptRegistry {
 public:
  // Registry holding the agents' built-in templates.
  static PromptRegistry with_defaults();

  void add(PromptTemplate t);
  bool contains(const std::string& id) const { return templates_.count(id) != 0; }
  const PromptTemplate& get(const std::string& id) const;
  std::vector<std::string> ids() const;

  // UnknownTemplate, UnboundPlaceholder(name).
  std::string render(const std::string& id, const Bindings& bindings) const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

const PromptRegistry& default_registry();

// Shorthand for default_registry().render(...).
std::string render_prompt(const std::string& template_id, const Bindings& bindings);

// Substitutes placeholders in one body. Exposed for tests.
std::string substitute(const std::string& body, const Bindings& bindings);

// Pipeline stage a template belongs to: the id up to the first '.'.
std::string stage_of(const std::string& template_id);

}  // namespace glagent::llm
