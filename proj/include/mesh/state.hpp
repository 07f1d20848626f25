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

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesh/classification.hpp"
#include "mesh/contracts.hpp"
#include "mesh/enforcement.hpp"
#include "mesh/event_log.hpp"
#include "mesh/mesh_graph.hpp"
#include "mesh/policy.hpp"

namespace mesh {

// Hex key material by key id, persisted outside the event log so raw key
// bytes never appear in the journal; events carry only a digest.
using Keystore = std::map<std::string, std::string>;

// The replayable control-plane state: state == fold(apply_event) over the
// journal. Every field below is reconstructed deterministically.
struct MeshState {
  MeshGraph graph;
  ClassificationStore classifications;
  std::map<std::string, Policy> policies;  // by name; re-apply replaces
  std::map<std::string, KeyRecord> keys;   // by key id
  ContractRegistry contracts;

  // Canonical JSON of everything state-bearing; key material appears only as
  // a SHA-256 digest so snapshots are safe to print and diff.
  nlohmann::json snapshot() const;
  std::string state_hash() const;  // SHA-256 hex of the canonical snapshot
};

// Deterministic transition function shared by live commits and replay.
// Audit-only kinds (decisions, token issuance, key handouts, contract runs,
// subject deletions) do not change state. Throws kCorruptLog when an event
// cannot apply (e.g. key material missing from the keystore).
void apply_event(MeshState& state, const EventRecord& event, const Keystore& keystore);

MeshState replay(const std::vector<EventRecord>& events, const Keystore& keystore);

// ---------------------------------------------------------------------------
// Catalog search (the consumer-facing metadata view).
// ---------------------------------------------------------------------------

struct CatalogPortSummary {
  std::string id;
  InterfaceType interface_type = InterfaceType::kBlob;
  std::set<std::string> effective_labels;
  std::vector<Slo> slos;
};

struct CatalogEntry {
  std::string product_id;
  Archetype archetype = Archetype::kSourceAligned;
  std::string description;
  std::vector<CatalogPortSummary> ports;
};

// Case-insensitive substring match over ids and descriptions; empty query
// matches everything. With a label filter, only ports whose effective labels
// contain it are listed (products without such ports drop out entirely).
std::vector<CatalogEntry> search_catalog(const MeshState& state, const std::string& query,
                                         const std::string& label_filter);

}  // namespace mesh
