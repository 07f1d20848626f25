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

#include "mesh/classification.hpp"

#include <algorithm>

#include "mesh/csv.hpp"
#include "mesh/errors.hpp"

namespace mesh {

const char* to_string(OverrideStatus v) {
  switch (v) {
    case OverrideStatus::kAutoApproved: return "auto_approved";
    case OverrideStatus::kPending: return "pending";
    case OverrideStatus::kApproved: return "approved";
    case OverrideStatus::kRejected: return "rejected";
  }
  return "";
}

std::optional<OverrideStatus> override_status_from_string(const std::string& s) {
  if (s == "auto_approved") return OverrideStatus::kAutoApproved;
  if (s == "pending") return OverrideStatus::kPending;
  if (s == "approved") return OverrideStatus::kApproved;
  if (s == "rejected") return OverrideStatus::kRejected;
  return std::nullopt;
}

ClassificationStore::ClassificationStore() {
  labels[kPublicLabel] = SensitivityLabel{
      kPublicLabel, {}, "explicitly non-sensitive; carries no obligations"};
}

const SensitivityLabel& ClassificationStore::define_label(const std::string& name,
                                                          const std::set<Obligation>& obligations,
                                                          const std::string& description) {
  if (name.empty()) {
    throw MeshError(ErrorCode::kInvalidArgument, "label name must be non-empty");
  }
  if (labels.contains(name)) {
    throw MeshError(ErrorCode::kDuplicate, "sensitivity level '" + name + "' is already defined");
  }
  auto [it, _] = labels.emplace(name, SensitivityLabel{name, obligations, description});
  return it->second;
}

std::set<std::string> ClassificationStore::effective(const ClassificationState& state) const {
  if (state.active_override) {
    auto it = overrides.find(*state.active_override);
    if (it != overrides.end()) return it->second.labels;
  }
  std::set<std::string> out = state.declared;
  out.insert(state.inherited.begin(), state.inherited.end());
  return out;
}

std::set<std::string> ClassificationStore::effective(const PortRef& ref) const {
  const auto* state = find_state(ref);
  return state == nullptr ? std::set<std::string>{} : effective(*state);
}

bool ClassificationStore::untagged(const PortRef& ref) const {
  const auto* state = find_state(ref);
  if (state == nullptr) return true;
  return state->declared.empty() && state->inherited.empty() && !state->active_override;
}

std::set<Obligation> ClassificationStore::obligations_of(
    const std::set<std::string>& label_names) const {
  std::set<Obligation> out;
  for (const auto& name : label_names) {
    auto it = labels.find(name);
    if (it != labels.end()) {
      out.insert(it->second.obligations.begin(), it->second.obligations.end());
    }
  }
  return out;
}

void ClassificationStore::ensure_labels_registered(const std::set<std::string>& label_names) const {
  for (const auto& name : label_names) {
    if (!labels.contains(name)) {
      throw MeshError(ErrorCode::kUnknownLabel, "sensitivity level '" + name + "' is not defined");
    }
  }
}

const ClassificationState* ClassificationStore::find_state(const PortRef& ref) const {
  auto it = states.find(ref.str());
  return it == states.end() ? nullptr : &it->second;
}

ClassificationState& ClassificationStore::state_or_throw(const PortRef& ref) {
  auto it = states.find(ref.str());
  if (it == states.end()) {
    throw MeshError(ErrorCode::kNotFound, "unknown output port '" + ref.str() + "'");
  }
  return it->second;
}

ClassificationState& tag_port(ClassificationStore& store, const MeshGraph& graph,
                              const PortRef& ref, const std::set<std::string>& labels) {
  if (graph.find_output_port({ref.product_id, ref.port_id}) == nullptr) {
    throw MeshError(ErrorCode::kNotFound, "unknown output port '" + ref.str() + "'");
  }
  store.ensure_labels_registered(labels);
  auto& state = store.states[ref.str()];
  state.port = ref;
  state.declared = labels;
  return state;
}

std::map<std::string, std::set<std::string>> propagate(const MeshGraph& graph,
                                                       ClassificationStore& store) {
  // Drop states of ports that no longer exist so the store is a pure function
  // of graph + declarations + overrides.
  for (auto it = store.states.begin(); it != store.states.end();) {
    const auto& port = it->second.port;
    if (graph.find_output_port({port.product_id, port.port_id}) == nullptr) {
      it = store.states.erase(it);
    } else {
      ++it;
    }
  }

  std::map<std::string, std::set<std::string>> result;
  for (const auto& product_id : graph.topological_order()) {
    const auto& product = *graph.find_product(product_id);

    std::set<std::string> inherited;
    for (const auto& input : product.input_ports) {
      if (const auto* ref = std::get_if<MeshPortRef>(&input.target)) {
        if (graph.find_output_port(*ref) == nullptr) continue;  // dangling after force-removal
        auto labels = store.effective(PortRef{ref->product_id, ref->port_id});
        inherited.insert(labels.begin(), labels.end());
      } else {
        const auto& ext = std::get<ExternalSourceRef>(input.target);
        inherited.insert(ext.manual_labels.begin(), ext.manual_labels.end());
      }
    }

    for (const auto& port : product.output_ports) {
      PortRef ref{product_id, port.id};
      auto& state = store.states[ref.str()];
      state.port = ref;
      state.inherited = inherited;
      result[ref.str()] = store.effective(state);
    }
  }
  return result;
}

OverrideRequest& request_override(ClassificationStore& store, const MeshGraph& graph,
                                  const std::string& request_id, const PortRef& ref,
                                  const std::set<std::string>& labels,
                                  const std::string& justification,
                                  const std::string& requested_by, std::int64_t now) {
  if (graph.find_output_port({ref.product_id, ref.port_id}) == nullptr) {
    throw MeshError(ErrorCode::kNotFound, "unknown output port '" + ref.str() + "'");
  }
  store.ensure_labels_registered(labels);
  if (store.overrides.contains(request_id)) {
    throw MeshError(ErrorCode::kDuplicate, "override request '" + request_id + "' already exists");
  }
  auto& state = store.states[ref.str()];
  state.port = ref;
  if (state.pending_override) {
    throw MeshError(ErrorCode::kPendingOverride,
                    "port '" + ref.str() + "' already has a pending override ('" +
                        *state.pending_override + "')");
  }

  OverrideRequest request;
  request.id = request_id;
  request.port = ref;
  request.labels = labels;
  request.justification = justification;
  request.requested_by = requested_by;
  request.requested_at = now;

  // Additive-only requests skip review: the proposal must cover every current
  // label and every obligation those labels imply.
  std::set<std::string> current = state.declared;
  current.insert(state.inherited.begin(), state.inherited.end());
  const auto current_obligations = store.obligations_of(current);
  const auto proposed_obligations = store.obligations_of(labels);
  const bool labels_superset = std::includes(labels.begin(), labels.end(),
                                             current.begin(), current.end());
  const bool obligations_superset =
      std::includes(proposed_obligations.begin(), proposed_obligations.end(),
                    current_obligations.begin(), current_obligations.end());
  if (labels_superset && obligations_superset) {
    request.status = OverrideStatus::kAutoApproved;
    request.reviewed_at = now;
    state.active_override = request_id;  // supersedes any previous override
  } else {
    request.status = OverrideStatus::kPending;
    state.pending_override = request_id;
  }

  auto [it, _] = store.overrides.emplace(request_id, std::move(request));
  return it->second;
}

OverrideRequest& review_override(ClassificationStore& store, const std::string& request_id,
                                 ReviewVerdict verdict, const std::string& reviewer,
                                 std::int64_t now) {
  auto it = store.overrides.find(request_id);
  if (it == store.overrides.end()) {
    throw MeshError(ErrorCode::kNotFound, "unknown override request '" + request_id + "'");
  }
  auto& request = it->second;
  if (request.status != OverrideStatus::kPending) {
    throw MeshError(ErrorCode::kNotPending, "override request '" + request_id + "' is " +
                                                to_string(request.status) + ", not pending");
  }
  request.reviewer = reviewer;
  request.reviewed_at = now;
  auto state_it = store.states.find(request.port.str());
  if (verdict == ReviewVerdict::kApprove) {
    request.status = OverrideStatus::kApproved;
    if (state_it != store.states.end()) {
      state_it->second.active_override = request_id;
      state_it->second.pending_override.reset();
    }
  } else {
    request.status = OverrideStatus::kRejected;
    if (state_it != store.states.end() && state_it->second.pending_override == request_id) {
      state_it->second.pending_override.reset();
    }
  }
  return request;
}

bool ComplianceReport::compliant() const {
  if (untagged) return false;
  return std::all_of(findings.begin(), findings.end(),
                     [](const ObligationFinding& f) { return f.met; });
}

ComplianceReport check_obligations(const MeshGraph& graph, const ClassificationStore& store,
                                   const PortRef& ref) {
  const auto* port = graph.find_output_port({ref.product_id, ref.port_id});
  if (port == nullptr) {
    throw MeshError(ErrorCode::kNotFound, "unknown output port '" + ref.str() + "'");
  }
  ComplianceReport report;
  report.port = ref;
  report.untagged = store.untagged(ref);
  report.effective = store.effective(ref);

  for (auto obligation : store.obligations_of(report.effective)) {
    ObligationFinding finding;
    finding.obligation = obligation;
    switch (obligation) {
      case Obligation::kEncryptAtRest:
        finding.met = port->encryption_enabled;
        finding.detail = finding.met ? "encryption enabled on port"
                                     : "encrypt_at_rest unmet: port stores plaintext";
        break;
      case Obligation::kSubjectTraceability: {
        bool has_subject_column = std::any_of(port->schema.begin(), port->schema.end(),
                                              [](const Column& c) { return c.subject_ref; });
        finding.met = has_subject_column;
        finding.detail = finding.met
                             ? "schema declares a subject-reference column"
                             : "subject_traceability unmet: no subject-reference column in schema";
        break;
      }
      case Obligation::kInsiderAccessOnly:
        finding.met = true;  // enforced at decision time by the policy engine
        finding.detail = "access restriction enforced by the policy engine";
        break;
    }
    report.findings.push_back(std::move(finding));
  }
  return report;
}

DeletionReport forget_subject(const MeshGraph& graph, const ClassificationStore& store,
                              const std::string& subject_id, const StorePaths& paths) {
  if (subject_id.empty()) {
    throw MeshError(ErrorCode::kInvalidArgument, "subject id must be non-empty");
  }

  struct Target {
    std::string port_label;
    std::filesystem::path file;
    std::string column;
  };
  std::vector<Target> targets;

  // Collect first and fail before touching any store: deletion must be
  // guaranteed for every covered port or refused outright.
  for (const auto& [product_id, product] : graph.products()) {
    for (const auto& port : product.output_ports) {
      PortRef ref{product_id, port.id};
      auto obligations = store.obligations_of(store.effective(ref));
      if (!obligations.contains(Obligation::kSubjectTraceability)) continue;

      auto column = std::find_if(port.schema.begin(), port.schema.end(),
                                 [](const Column& c) { return c.subject_ref; });
      if (column == port.schema.end()) {
        throw MeshError(ErrorCode::kObligationViolation,
                        "port '" + ref.str() +
                            "' carries subject_traceability but declares no subject-reference "
                            "column; deletion cannot be guaranteed");
      }
      targets.push_back({ref.str(), paths.output_path(product, port), column->name});

      // By-copy consumers hold materialized copies of this port's data.
      for (const auto& [consumer_id, consumer] : graph.products()) {
        for (const auto& input : consumer.input_ports) {
          const auto* target = std::get_if<MeshPortRef>(&input.target);
          if (target == nullptr || target->product_id != product_id ||
              target->port_id != port.id || input.style != ConsumptionStyle::kByCopy) {
            continue;
          }
          targets.push_back({PortRef{consumer_id, input.id}.str() + " (copy)",
                             paths.copy_path(consumer, input), column->name});
        }
      }
    }
  }

  DeletionReport report;
  report.subject = subject_id;
  for (const auto& target : targets) {
    if (!std::filesystem::exists(target.file)) continue;  // nothing materialized yet
    auto table = read_csv_file(target.file);
    auto column = table.column_index(target.column);
    if (!column) {
      throw MeshError(ErrorCode::kObligationViolation,
                      "store '" + target.file.string() + "' lacks subject-reference column '" +
                          target.column + "'; deletion cannot be guaranteed");
    }
    auto before = table.rows.size();
    std::erase_if(table.rows, [&](const std::vector<std::string>& row) {
      return *column < row.size() && row[*column] == subject_id;
    });
    auto removed = static_cast<std::int64_t>(before - table.rows.size());
    if (removed > 0) {
      write_csv_file(target.file, table);
      report.entries.push_back({target.port_label, target.file.string(), removed});
    }
  }
  return report;
}

}  // namespace mesh
