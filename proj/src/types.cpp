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

#include "mesh/types.hpp"

#include "mesh/errors.hpp"

namespace mesh {

std::string DataProduct::name() const {
  auto pos = id.find('/');
  return pos == std::string::npos ? id : id.substr(pos + 1);
}

PortRef parse_port_ref(const std::string& text) {
  auto pos = text.rfind(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 == text.size()) {
    throw MeshError(ErrorCode::kInvalidArgument,
                    "port reference must be '<domain>/<name>:<port>', got '" + text + "'");
  }
  return PortRef{text.substr(0, pos), text.substr(pos + 1)};
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kDanglingRef: return "dangling_ref";
    case ErrorCode::kCycle: return "cycle";
    case ErrorCode::kInvalidDescriptor: return "invalid_descriptor";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kUnknownLabel: return "unknown_label";
    case ErrorCode::kPendingOverride: return "pending_override";
    case ErrorCode::kNotPending: return "not_pending";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kScopeMismatch: return "scope_mismatch";
    case ErrorCode::kUnsupportedConstruct: return "unsupported_construct";
    case ErrorCode::kUntagged: return "untagged";
    case ErrorCode::kObligationViolation: return "obligation_violation";
    case ErrorCode::kEncryptionDisabled: return "encryption_disabled";
    case ErrorCode::kNotSqlPort: return "not_sql_port";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kCorruptLog: return "corrupt_log";
  }
  return "unknown";
}

const char* to_string(Archetype v) {
  switch (v) {
    case Archetype::kSourceAligned: return "source_aligned";
    case Archetype::kConsumerAligned: return "consumer_aligned";
  }
  return "";
}

const char* to_string(InterfaceType v) {
  switch (v) {
    case InterfaceType::kBlob: return "blob";
    case InterfaceType::kStreaming: return "streaming";
    case InterfaceType::kSql: return "sql";
  }
  return "";
}

const char* to_string(ConsumptionStyle v) {
  switch (v) {
    case ConsumptionStyle::kByCopy: return "by_copy";
    case ConsumptionStyle::kByReference: return "by_reference";
    case ConsumptionStyle::kByProjection: return "by_projection";
  }
  return "";
}

const char* to_string(ColumnType v) {
  switch (v) {
    case ColumnType::kString: return "string";
    case ColumnType::kInt: return "int";
    case ColumnType::kFloat: return "float";
    case ColumnType::kBool: return "bool";
    case ColumnType::kTimestamp: return "timestamp";
  }
  return "";
}

const char* to_string(SloKind v) {
  switch (v) {
    case SloKind::kFreshnessSeconds: return "freshness_seconds";
    case SloKind::kCompletenessPct: return "completeness_pct";
    case SloKind::kAvailabilityPct: return "availability_pct";
  }
  return "";
}

const char* to_string(ExpectationKind v) {
  switch (v) {
    case ExpectationKind::kColumnPresent: return "column_present";
    case ExpectationKind::kNonNullFraction: return "non_null_fraction";
    case ExpectationKind::kMinRowCount: return "min_row_count";
    case ExpectationKind::kMaxStalenessSeconds: return "max_staleness_seconds";
  }
  return "";
}

const char* to_string(Obligation v) {
  switch (v) {
    case Obligation::kEncryptAtRest: return "encrypt_at_rest";
    case Obligation::kSubjectTraceability: return "subject_traceability";
    case Obligation::kInsiderAccessOnly: return "insider_access_only";
  }
  return "";
}

std::optional<Archetype> archetype_from_string(const std::string& s) {
  if (s == "source_aligned") return Archetype::kSourceAligned;
  if (s == "consumer_aligned") return Archetype::kConsumerAligned;
  return std::nullopt;
}

std::optional<InterfaceType> interface_type_from_string(const std::string& s) {
  if (s == "blob") return InterfaceType::kBlob;
  if (s == "streaming") return InterfaceType::kStreaming;
  if (s == "sql") return InterfaceType::kSql;
  return std::nullopt;
}

std::optional<ConsumptionStyle> consumption_style_from_string(const std::string& s) {
  if (s == "by_copy") return ConsumptionStyle::kByCopy;
  if (s == "by_reference") return ConsumptionStyle::kByReference;
  if (s == "by_projection") return ConsumptionStyle::kByProjection;
  return std::nullopt;
}

std::optional<ColumnType> column_type_from_string(const std::string& s) {
  if (s == "string") return ColumnType::kString;
  if (s == "int") return ColumnType::kInt;
  if (s == "float") return ColumnType::kFloat;
  if (s == "bool") return ColumnType::kBool;
  if (s == "timestamp") return ColumnType::kTimestamp;
  return std::nullopt;
}

std::optional<SloKind> slo_kind_from_string(const std::string& s) {
  if (s == "freshness_seconds") return SloKind::kFreshnessSeconds;
  if (s == "completeness_pct") return SloKind::kCompletenessPct;
  if (s == "availability_pct") return SloKind::kAvailabilityPct;
  return std::nullopt;
}

std::optional<ExpectationKind> expectation_kind_from_string(const std::string& s) {
  if (s == "column_present") return ExpectationKind::kColumnPresent;
  if (s == "non_null_fraction") return ExpectationKind::kNonNullFraction;
  if (s == "min_row_count") return ExpectationKind::kMinRowCount;
  if (s == "max_staleness_seconds") return ExpectationKind::kMaxStalenessSeconds;
  return std::nullopt;
}

std::optional<Obligation> obligation_from_string(const std::string& s) {
  if (s == "encrypt_at_rest") return Obligation::kEncryptAtRest;
  if (s == "subject_traceability") return Obligation::kSubjectTraceability;
  if (s == "insider_access_only") return Obligation::kInsiderAccessOnly;
  return std::nullopt;
}

}  // namespace mesh
