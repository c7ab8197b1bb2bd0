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

#include "glagent/clock.hpp"

#include "glagent/error.hpp"

namespace glagent {

std::unique_ptr<Clock> make_clock(std::string_view kind) {
  if (kind == "logical") return std::make_unique<LogicalClock>();
  if (kind == "wall") return std::make_unique<SteadyClock>();
  throw Error(ErrorCode::InvalidConfig, "unknown timing mode '" + std::string(kind) + "'");
}

}  // namespace glagent
