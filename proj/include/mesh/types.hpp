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

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace mesh {

// ---------------------------------------------------------------------------
// Product / port model. A data product is a mesh node owned by exactly one
// domain; composition edges run from input ports to target output ports.
// ---------------------------------------------------------------------------

enum class Archetype { kSourceAligned, kConsumerAligned };

// Exactly one access interface per output port; products expose one port per
// required access type.
enum class InterfaceType { kBlob, kStreaming, kSql };

enum class ConsumptionStyle { kByCopy, kByReference, kByProjection };

enum class ColumnType { kString, kInt, kFloat, kBool, kTimestamp };

struct Column {
  std::string name;
  ColumnType type = ColumnType::kString;
  // Marks the column that traces rows back to a data subject; required by the
  // subject_traceability obligation.
  bool subject_ref = false;

  bool operator==(const Column&) const = default;
};

enum class SloKind { kFreshnessSeconds, kCompletenessPct, kAvailabilityPct };

struct Slo {
  SloKind kind = SloKind::kFreshnessSeconds;
  double threshold = 0;

  bool operator==(const Slo&) const = default;
};

// Consumer-declared expectation clauses, executed against the provider's
// actual data. Declarative on purpose: they are embedded in descriptors and
// safe to run on the provider side.
enum class ExpectationKind {
  kColumnPresent,
  kNonNullFraction,
  kMinRowCount,
  kMaxStalenessSeconds,
};

struct Expectation {
  ExpectationKind kind = ExpectationKind::kColumnPresent;
  std::string column;          // column_present, non_null_fraction
  double min_fraction = 0;     // non_null_fraction
  std::int64_t min_rows = 0;   // min_row_count
  std::int64_t max_seconds = 0;  // max_staleness_seconds

  bool operator==(const Expectation&) const = default;
};

// Reference to an output port inside the mesh: "<domain>/<name>:<port>".
struct MeshPortRef {
  std::string product_id;
  std::string port_id;

  bool operator==(const MeshPortRef&) const = default;
  auto operator<=>(const MeshPortRef&) const = default;
};

// Source systems and data applications live outside the mesh boundary; they
// are referenced, not modeled as nodes, and their labels must be declared
// manually because the platform cannot inspect them.
struct ExternalSourceRef {
  std::string uri;
  std::set<std::string> manual_labels;

  bool operator==(const ExternalSourceRef&) const = default;
};

using InputTarget = std::variant<MeshPortRef, ExternalSourceRef>;

struct OutputPort {
  std::string id;
  std::string address;  // storage locator; a filesystem path at desk scale
  std::vector<Column> schema;
  InterfaceType interface_type = InterfaceType::kBlob;
  std::vector<Slo> slos;
  std::set<std::string> declared_labels;
  bool encryption_enabled = false;

  bool operator==(const OutputPort&) const = default;
};

struct InputPort {
  std::string id;
  InputTarget target;
  ConsumptionStyle style = ConsumptionStyle::kByReference;
  // Present iff style == kByProjection.
  std::optional<std::vector<std::string>> projection;
  std::vector<Expectation> expectations;

  bool operator==(const InputPort&) const = default;
};

struct DataProduct {
  std::string id;      // "<domain>/<name>"
  std::string domain;  // owning domain
  Archetype archetype = Archetype::kSourceAligned;
  std::string description;
  std::vector<OutputPort> output_ports;  // at least one
  std::vector<InputPort> input_ports;

  std::string name() const;  // id without the domain prefix

  bool operator==(const DataProduct&) const = default;
};

// "<product-id>:<port-id>"; the key used for classifications, tags, policies
// and enforcement.
struct PortRef {
  std::string product_id;
  std::string port_id;

  std::string str() const { return product_id + ":" + port_id; }

  bool operator==(const PortRef&) const = default;
  auto operator<=>(const PortRef&) const = default;
};

PortRef parse_port_ref(const std::string& text);

// ---------------------------------------------------------------------------
// Governance labels.
// ---------------------------------------------------------------------------

enum class Obligation { kEncryptAtRest, kSubjectTraceability, kInsiderAccessOnly };

struct SensitivityLabel {
  std::string name;
  std::set<Obligation> obligations;  // may be empty: purely informational
  std::string description;

  bool operator==(const SensitivityLabel&) const = default;
};

// Built-in zero-obligation label so teams can positively assert
// non-sensitivity; a port with no declared, no inherited and no public tag
// counts as untagged.
inline constexpr const char* kPublicLabel = "public";

// ---------------------------------------------------------------------------
// Enum <-> string. Names double as the wire vocabulary of descriptors,
// policies and the API, so they are centralized here.
// ---------------------------------------------------------------------------

const char* to_string(Archetype v);
const char* to_string(InterfaceType v);
const char* to_string(ConsumptionStyle v);
const char* to_string(ColumnType v);
const char* to_string(SloKind v);
const char* to_string(ExpectationKind v);
const char* to_string(Obligation v);

std::optional<Archetype> archetype_from_string(const std::string& s);
std::optional<InterfaceType> interface_type_from_string(const std::string& s);
std::optional<ConsumptionStyle> consumption_style_from_string(const std::string& s);
std::optional<ColumnType> column_type_from_string(const std::string& s);
std::optional<SloKind> slo_kind_from_string(const std::string& s);
std::optional<ExpectationKind> expectation_kind_from_string(const std::string& s);
std::optional<Obligation> obligation_from_string(const std::string& s);

}  // namespace mesh
