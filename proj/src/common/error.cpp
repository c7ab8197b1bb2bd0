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

#include "glagent/error.hpp"

namespace glagent {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownTemplate: return "UnknownTemplate";
    case ErrorCode::UnboundPlaceholder: return "UnboundPlaceholder";
    case ErrorCode::BackendUnreachable: return "BackendUnreachable";
    case ErrorCode::NoFixtureMatch: return "NoFixtureMatch";
    case ErrorCode::MissingCredentials: return "MissingCredentials";
    case ErrorCode::NoStructuredBlock: return "NoStructuredBlock";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::MalformedValue: return "MalformedValue";
    case ErrorCode::DuplicateRule: return "DuplicateRule";
    case ErrorCode::UnknownNamespace: return "UnknownNamespace";
    case ErrorCode::KeyAbsent: return "KeyAbsent";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::CorruptBundle: return "CorruptBundle";
    case ErrorCode::UnknownModule: return "UnknownModule";
    case ErrorCode::AllCandidatesFiltered: return "AllCandidatesFiltered";
    case ErrorCode::InvalidEnumValue: return "InvalidEnumValue";
    case ErrorCode::UnsupportedTask: return "UnsupportedTask";
    case ErrorCode::UnknownTransform: return "UnknownTransform";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::BudgetNonPositive: return "BudgetNonPositive";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::UnmappableSuggestion: return "UnmappableSuggestion";
    case ErrorCode::DatasetMismatch: return "DatasetMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::InapplicableTransform: return "InapplicableTransform";
    case ErrorCode::InvalidGenotype: return "InvalidGenotype";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::MetricMismatch: return "MetricMismatch";
    case ErrorCode::UnsupportedOp: return "UnsupportedOp";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::NotRelaxable: return "NotRelaxable";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

StageFailure::StageFailure(std::string stage, std::string operation, const Error& cause)
    : Error(cause.code(), stage + "/" + operation + ": " + cause.detail()),
      stage_(std::move(stage)),
      operation_(std::move(operation)) {}

}  // namespace glagent
