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

#include <stdexcept>
#include <string>

namespace glagent {

enum class ErrorCode {
  // llm_runtime
  UnknownTemplate,
  UnboundPlaceholder,
  BackendUnreachable,
  NoFixtureMatch,
  MissingCredentials,
  NoStructuredBlock,
  MissingKey,
  MalformedValue,
  DuplicateRule,
  // memory_store
  UnknownNamespace,
  KeyAbsent,
  IoFailure,
  CorruptBundle,
  // op_catalog
  UnknownModule,
  AllCandidatesFiltered,
  // agents
  InvalidEnumValue,
  UnsupportedTask,
  UnknownTransform,
  EmptySelection,
  BudgetNonPositive,
  EmptyLog,
  UnmappableSuggestion,
  DatasetMismatch,
  InvalidConfig,
  // graph_engine
  SchemaViolation,
  InvalidProbability,
  InvalidParameter,
  InapplicableTransform,
  InvalidGenotype,
  DimensionMismatch,
  NonFiniteLoss,
  MetricMismatch,
  UnsupportedOp,
  // arch_search
  SpaceTooLarge,
  NotRelaxable,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure in the library surfaces as this exception; `code()` names the
// error kind, `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// Raised by the pipeline runner when a stage fails; wraps the original error.
class StageFailure : public Error {
 public:
  StageFailure(std::string stage, std::string operation, const Error& cause);

  const std::string& stage() const noexcept { return stage_; }
  const std::string& operation() const noexcept { return operation_; }

 private:
  std::string stage_;
  std::string operation_;
};

}  // namespace glagent
