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
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mesh/mesh_graph.hpp"
#include "mesh/types.hpp"

namespace mesh {

enum class OverrideStatus { kAutoApproved, kPending, kApproved, kRejected };

const char* to_string(OverrideStatus v);
std::optional<OverrideStatus> override_status_from_string(const std::string& s);

// A local re-classification of an output port. Strictly additive requests
// (proposed labels and obligations are supersets of the inherited ones)
// auto-approve; anything that relaxes sensitivity waits for central review.
struct OverrideRequest {
  std::string id;
  PortRef port;
  std::set<std::string> labels;
  std::string justification;
  OverrideStatus status = OverrideStatus::kPending;
  std::string requested_by;
  std::string reviewer;
  std::int64_t requested_at = 0;
  std::int64_t reviewed_at = 0;

  bool operator==(const OverrideRequest&) const = default;
};

// Per-output-port label bookkeeping. `inherited` is recomputed by propagate(),
// never hand-edited. The override in force replaces declared+inherited for
// both the port's effective set and downstream propagation; a pending request
// changes nothing until approved.
struct ClassificationState {
  PortRef port;
  std::set<std::string> declared;
  std::set<std::string> inherited;
  std::optional<std::string> active_override;   // approved or auto-approved
  std::optional<std::string> pending_override;  // awaiting central review

  bool operator==(const ClassificationState&) const = default;
};

struct ClassificationStore {
  std::map<std::string, SensitivityLabel> labels;      // global registry
  std::map<std::string, ClassificationState> states;   // key: PortRef::str()
  std::map<std::string, OverrideRequest> overrides;    // full history, by id

  ClassificationStore();  // seeds the built-in zero-obligation "public" label

  const SensitivityLabel& define_label(const std::string& name,
                                       const std::set<Obligation>& obligations,
                                       const std::string& description);

  // Effective labels of a port, honoring an override in force.
  std::set<std::string> effective(const PortRef& ref) const;
  std::set<std::string> effective(const ClassificationState& state) const;

  // No declared, no inherited, no override in force. Data on an untagged port
  // must be refused by every enforcement mechanism.
  bool untagged(const PortRef& ref) const;

  std::set<Obligation> obligations_of(const std::set<std::string>& label_names) const;

  void ensure_labels_registered(const std::set<std::string>& label_names) const;

  const ClassificationState* find_state(const PortRef& ref) const;
  ClassificationState& state_or_throw(const PortRef& ref);

  bool operator==(const ClassificationStore&) const = default;
};

// Replaces the declared set of an output port. Propagation must be re-run by
// the caller afterwards.
ClassificationState& tag_port(ClassificationStore& store, const MeshGraph& graph,
                              const PortRef& ref, const std::set<std::string>& labels);

// Fixpoint of transitive label propagation, computed in topological order:
// a product inherits the union of the effective labels of everything its
// input ports target (external targets contribute their manual labels), and
// every one of its output ports carries that inherited set.
// Returns port ref string -> effective labels.
std::map<std::string, std::set<std::string>> propagate(const MeshGraph& graph,
                                                       ClassificationStore& store);

OverrideRequest& request_override(ClassificationStore& store, const MeshGraph& graph,
                                  const std::string& request_id, const PortRef& ref,
                                  const std::set<std::string>& labels,
                                  const std::string& justification,
                                  const std::string& requested_by, std::int64_t now);

enum class ReviewVerdict { kApprove, kReject };

OverrideRequest& review_override(ClassificationStore& store, const std::string& request_id,
                                 ReviewVerdict verdict, const std::string& reviewer,
                                 std::int64_t now);

// ---------------------------------------------------------------------------
// Obligation compliance.
// ---------------------------------------------------------------------------

struct ObligationFinding {
  Obligation obligation;
  bool met = false;
  std::string detail;

  bool operator==(const ObligationFinding&) const = default;
};

struct ComplianceReport {
  PortRef port;
  bool untagged = false;
  std::set<std::string> effective;
  std::vector<ObligationFinding> findings;

  bool compliant() const;
};

ComplianceReport check_obligations(const MeshGraph& graph, const ClassificationStore& store,
                                   const PortRef& ref);

// ---------------------------------------------------------------------------
// Subject deletion (right to be forgotten).
// ---------------------------------------------------------------------------

// Maps ports and by-copy materializations onto concrete files; supplied by
// the operator so this module stays independent of the state directory layout.
struct StorePaths {
  std::function<std::filesystem::path(const DataProduct&, const OutputPort&)> output_path;
  std::function<std::filesystem::path(const DataProduct&, const InputPort&)> copy_path;
};

struct DeletionEntry {
  std::string port;   // output port ref, or consumer input port ref for copies
  std::string store;  // file purged
  std::int64_t rows_removed = 0;

  bool operator==(const DeletionEntry&) const = default;
};

struct DeletionReport {
  std::string subject;
  std::vector<DeletionEntry> entries;  // only stores with removed rows
};

// Purges every row referencing the subject from all stores of output ports
// whose effective labels carry subject_traceability, plus every by-copy
// materialization consuming such ports. Throws kObligationViolation when a
// covered port lacks a subject-reference column, before touching any store.
DeletionReport forget_subject(const MeshGraph& graph, const ClassificationStore& store,
                              const std::string& subject_id, const StorePaths& paths);

}  // namespace mesh
