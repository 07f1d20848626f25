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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mesh/csv.hpp"
#include "mesh/mesh_graph.hpp"
#include "mesh/types.hpp"

namespace mesh {

// A consumer's expectations, registered with the providing output port and
// executed against the provider's actual data.
struct RegisteredContract {
  std::string id;
  PortRef consumer_input;   // owner of the expectations
  MeshPortRef provider;     // output port the contract runs against
  std::vector<Expectation> expectations;

  bool operator==(const RegisteredContract&) const = default;
};

// Key: provider output port ref string.
using ContractRegistry = std::map<std::string, std::vector<RegisteredContract>>;

struct ExpectationResult {
  PortRef owner;
  Expectation expectation;
  bool pass = false;
  std::string detail;  // violation details, e.g. the measured fraction
};

struct ContractReport {
  PortRef output_port;
  std::vector<ExpectationResult> results;
  std::int64_t evaluated_at = 0;
  bool alert_raised = false;  // true iff at least one violation

  std::size_t violations() const;
};

// Attaches the input port's expectations to its target output port.
// Errors: external-source targets (nothing inside the mesh to register
// against) and empty expectation lists.
RegisteredContract make_contract(const MeshGraph& graph, const std::string& contract_id,
                                 const std::string& consumer_product, const InputPort& input);

// Evaluates every registered expectation against the current dataset.
// Pure given the table bytes and timestamps: same data, same report.
ContractReport run_contracts(const PortRef& output_port, const ContractRegistry& registry,
                             const CsvTable& table, std::int64_t store_mtime, std::int64_t now);

// ---------------------------------------------------------------------------
// Output-port SLO checks. Observed metrics come from the caller (or from
// store mtime / row scans at desk scale), not from a monitoring pipeline.
// ---------------------------------------------------------------------------

struct ObservedMetrics {
  std::optional<std::int64_t> last_updated;     // unix seconds
  std::optional<double> completeness_pct;
  std::optional<double> availability_pct;
};

struct SloResult {
  Slo slo;
  double observed = 0;
  bool pass = false;
  std::string detail;
};

std::vector<SloResult> check_slo(const OutputPort& port, const ObservedMetrics& observed,
                                 std::int64_t now);

}  // namespace mesh
