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

#include "mesh/contracts.hpp"

#include <algorithm>
#include <sstream>

#include "mesh/errors.hpp"

namespace mesh {

namespace {

std::string format_fraction(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

ExpectationResult evaluate_expectation(const PortRef& owner, const Expectation& expectation,
                                       const CsvTable& table, std::int64_t store_mtime,
                                       std::int64_t now) {
  ExpectationResult result;
  result.owner = owner;
  result.expectation = expectation;
  switch (expectation.kind) {
    case ExpectationKind::kColumnPresent: {
      result.pass = table.column_index(expectation.column).has_value();
      if (!result.pass) {
        result.detail = "column '" + expectation.column + "' missing from dataset";
      }
      break;
    }
    case ExpectationKind::kNonNullFraction: {
      auto index = table.column_index(expectation.column);
      if (!index) {
        result.pass = false;
        result.detail = "column '" + expectation.column + "' missing from dataset";
        break;
      }
      double measured = table.non_null_fraction(*index);
      result.pass = measured >= expectation.min_fraction;
      if (!result.pass) {
        result.detail = "non-null fraction of '" + expectation.column + "' is " +
                        format_fraction(measured) + ", expected >= " +
                        format_fraction(expectation.min_fraction);
      }
      break;
    }
    case ExpectationKind::kMinRowCount: {
      auto rows = static_cast<std::int64_t>(table.rows.size());
      result.pass = rows >= expectation.min_rows;
      if (!result.pass) {
        result.detail = "dataset has " + std::to_string(rows) + " rows, expected >= " +
                        std::to_string(expectation.min_rows);
      }
      break;
    }
    case ExpectationKind::kMaxStalenessSeconds: {
      auto age = now - store_mtime;
      result.pass = age <= expectation.max_seconds;
      if (!result.pass) {
        result.detail = "dataset is " + std::to_string(age) + "s old, expected <= " +
                        std::to_string(expectation.max_seconds) + "s";
      }
      break;
    }
  }
  return result;
}

}  // namespace

std::size_t ContractReport::violations() const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(),
                    [](const ExpectationResult& r) { return !r.pass; }));
}

RegisteredContract make_contract(const MeshGraph& graph, const std::string& contract_id,
                                 const std::string& consumer_product, const InputPort& input) {
  const auto* target = std::get_if<MeshPortRef>(&input.target);
  if (target == nullptr) {
    throw MeshError(ErrorCode::kInvalidArgument,
                    "input port '" + input.id +
                        "' targets an external source; contracts register against mesh output "
                        "ports only");
  }
  if (input.expectations.empty()) {
    throw MeshError(ErrorCode::kInvalidArgument,
                    "input port '" + input.id + "' declares no expectations");
  }
  if (graph.find_output_port(*target) == nullptr) {
    throw MeshError(ErrorCode::kDanglingRef,
                    "input port '" + input.id + "' targets unknown output port '" +
                        target->product_id + ":" + target->port_id + "'");
  }
  RegisteredContract contract;
  contract.id = contract_id;
  contract.consumer_input = PortRef{consumer_product, input.id};
  contract.provider = *target;
  contract.expectations = input.expectations;
  return contract;
}

ContractReport run_contracts(const PortRef& output_port, const ContractRegistry& registry,
                             const CsvTable& table, std::int64_t store_mtime, std::int64_t now) {
  ContractReport report;
  report.output_port = output_port;
  report.evaluated_at = now;
  auto it = registry.find(output_port.str());
  if (it != registry.end()) {
    for (const auto& contract : it->second) {
      for (const auto& expectation : contract.expectations) {
        report.results.push_back(evaluate_expectation(contract.consumer_input, expectation, table,
                                                      store_mtime, now));
      }
    }
  }
  report.alert_raised = report.violations() > 0;
  return report;
}

std::vector<SloResult> check_slo(const OutputPort& port, const ObservedMetrics& observed,
                                 std::int64_t now) {
  std::vector<SloResult> results;
  for (const auto& slo : port.slos) {
    SloResult result;
    result.slo = slo;
    switch (slo.kind) {
      case SloKind::kFreshnessSeconds: {
        if (!observed.last_updated) {
          result.pass = false;
          result.detail = "no last_updated observation";
          break;
        }
        result.observed = static_cast<double>(now - *observed.last_updated);
        result.pass = result.observed <= slo.threshold;
        result.detail = "age " + std::to_string(static_cast<std::int64_t>(result.observed)) +
                        "s vs threshold " + std::to_string(static_cast<std::int64_t>(slo.threshold)) +
                        "s";
        break;
      }
      case SloKind::kCompletenessPct: {
        if (!observed.completeness_pct) {
          result.pass = false;
          result.detail = "no completeness observation";
          break;
        }
        result.observed = *observed.completeness_pct;
        result.pass = result.observed >= slo.threshold;
        break;
      }
      case SloKind::kAvailabilityPct: {
        if (!observed.availability_pct) {
          result.pass = false;
          result.detail = "no availability observation";
          break;
        }
        result.observed = *observed.availability_pct;
        result.pass = result.observed >= slo.threshold;
        break;
      }
    }
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace mesh
