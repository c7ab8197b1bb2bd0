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

#include "glagent/metric.hpp"

#include <cctype>
#include <cstdlib>

#include "glagent/error.hpp"

namespace glagent {

std::string Metric::to_string() const {
  switch (kind) {
    case Kind::Accuracy: return "accuracy";
    case Kind::RSquared: return "r_squared";
    case Kind::RecallAtK: return "recall_at_" + std::to_string(k);
  }
  return "?";
}

Metric Metric::parse(const std::string& text) {
  if (text == "accuracy") return accuracy();
  if (text == "r_squared") return r_squared();
  const std::string prefix = "recall_at_";
  if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size()) {
    const std::string digits = text.substr(prefix.size());
    bool ok = true;
    for (char c : digits) ok = ok && std::isdigit(static_cast<unsigned char>(c));
    const int k = ok ? std::atoi(digits.c_str()) : 0;
    if (k > 0) return recall_at(k);
  }
  throw Error(ErrorCode::InvalidEnumValue, "metric: " + text);
}

}  // namespace glagent
