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

namespace glagent {

struct Metric {
  enum class Kind { Accuracy, RSquared, RecallAtK };
  Kind kind = Kind::Accuracy;
  int k = 20;  // RecallAtK only

  static Metric accuracy() { return {Kind::Accuracy, 0}; }
  static Metric r_squared() { return {Kind::RSquared, 0}; }
  static Metric recall_at(int k) { return {Kind::RecallAtK, k}; }

  // "accuracy", "r_squared", "recall_at_20".
  std::string to_string() const;
  static Metric parse(const std::string& text);

  friend bool operator==(const Metric&, const Metric&) = default;
};

}  // namespace glagent
