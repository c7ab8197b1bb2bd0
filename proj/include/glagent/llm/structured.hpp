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

#include <string>
#include <vector>

#include "glagent/json.hpp"

namespace glagent::llm {

// Finds the brace-delimited key/value blocks at the top level of free text
// and parses them. Python-literal and JSON syntax are both accepted: single
// or double quoted strings, bare or unbalanced-quote keys, True/False/None,
// trailing commas. When several top-level blocks appear their keys merge,
// later blocks winning.
//
// NoStructuredBlock when there is no block, MalformedValue(key) on a value
// that does not parse, MissingKey(name) when an expected key is absent.
Json parse_structured(const std::string& text, const std::vector<std::string>& expected_keys = {});

// Renders a map in the single-quoted literal style; parse_structured reads it back.
std::string serialize(const Json& map);

}  // namespace glagent::llm
