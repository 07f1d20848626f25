// Copyright 2026 the meshplane authors
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

namespace mesh {

enum class ErrorCode {
  kNotFound,
  kDuplicate,
  kDanglingRef,
  kCycle,
  kInvalidDescriptor,
  kInvalidArgument,
  kUnknownLabel,
  kPendingOverride,
  kNotPending,
  kParse,
  kScopeMismatch,
  kUnsupportedConstruct,
  kUntagged,
  kObligationViolation,
  kEncryptionDisabled,
  kNotSqlPort,
  kIo,
  kCorruptLog,
};

const char* error_code_name(ErrorCode code);

// Single exception type for all control-plane errors. Policy denials are
// values (Decision / Denial), never exceptions.
class MeshError : public std::runtime_error {
 public:
  MeshError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mesh
