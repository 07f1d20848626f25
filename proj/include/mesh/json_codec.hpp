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

#include <nlohmann/json.hpp>

#include "mesh/classification.hpp"
#include "mesh/contracts.hpp"
#include "mesh/enforcement.hpp"
#include "mesh/mesh_graph.hpp"
#include "mesh/policy.hpp"
#include "mesh/state.hpp"

// JSON views of API-facing records; shared by the HTTP service, the CLI and
// the python bindings so every surface renders identically.
namespace mesh {

nlohmann::json to_json(const Decision& decision);
nlohmann::json to_json(const SensitivityLabel& label);
nlohmann::json to_json(const OverrideRequest& request);
nlohmann::json to_json(const ClassificationState& state, const ClassificationStore& store);
nlohmann::json to_json(const ComplianceReport& report);
nlohmann::json to_json(const DeletionReport& report);
nlohmann::json to_json(const ContractReport& report);
nlohmann::json to_json(const std::vector<SloResult>& results);
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const RemovalReport& report);
nlohmann::json to_json(const RowSet& rows);
nlohmann::json to_json(const Denial& denial);
nlohmann::json to_json(const CatalogEntry& entry);

// {"user": ..., "roles": [...], "domain": ..., "attrs": {...}}; only "user"
// is required.
Subject subject_from_json(const nlohmann::json& doc);

}  // namespace mesh
