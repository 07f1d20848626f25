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

#include "mesh/json_codec.hpp"

#include "mesh/errors.hpp"

namespace mesh {

using nlohmann::json;

json to_json(const Decision& decision) {
  json doc;
  doc["effect"] = to_string(decision.effect);
  if (decision.matched_rule) {
    doc["matched_rule"] = {{"policy", decision.matched_rule->policy},
                           {"rule_index", decision.matched_rule->rule_index}};
  } else {
    doc["matched_rule"] = nullptr;
  }
  if (decision.scope_consulted) {
    switch (*decision.scope_consulted) {
      case PolicyScope::Kind::kGlobal: doc["scope_consulted"] = "global"; break;
      case PolicyScope::Kind::kDomain: doc["scope_consulted"] = "domain"; break;
      case PolicyScope::Kind::kProduct: doc["scope_consulted"] = "product"; break;
    }
  } else {
    doc["scope_consulted"] = nullptr;
  }
  if (!decision.denied_columns.empty()) doc["denied_columns"] = decision.denied_columns;
  doc["trace"] = json::array();
  for (const auto& entry : decision.trace) {
    json item;
    item["policy"] = entry.policy;
    item["rule_index"] = entry.rule_index;
    item["rule"] = entry.rule;
    item["matched"] = entry.matched;
    if (entry.column) item["column"] = *entry.column;
    if (!entry.note.empty()) item["note"] = entry.note;
    doc["trace"].push_back(std::move(item));
  }
  return doc;
}

json to_json(const SensitivityLabel& label) {
  json obligations = json::array();
  for (auto o : label.obligations) obligations.push_back(to_string(o));
  return {{"name", label.name}, {"obligations", obligations}, {"description", label.description}};
}

json to_json(const OverrideRequest& request) {
  return {{"id", request.id},
          {"port", request.port.str()},
          {"labels", request.labels},
          {"justification", request.justification},
          {"status", to_string(request.status)},
          {"requested_by", request.requested_by},
          {"reviewer", request.reviewer},
          {"requested_at", request.requested_at},
          {"reviewed_at", request.reviewed_at}};
}

json to_json(const ClassificationState& state, const ClassificationStore& store) {
  json doc;
  doc["port"] = state.port.str();
  doc["declared"] = state.declared;
  doc["inherited"] = state.inherited;
  doc["effective"] = store.effective(state);
  doc["untagged"] = store.untagged(state.port);
  if (state.active_override) doc["active_override"] = *state.active_override;
  if (state.pending_override) doc["pending_override"] = *state.pending_override;
  return doc;
}

json to_json(const ComplianceReport& report) {
  json doc;
  doc["port"] = report.port.str();
  doc["untagged"] = report.untagged;
  doc["effective"] = report.effective;
  doc["compliant"] = report.compliant();
  doc["findings"] = json::array();
  for (const auto& finding : report.findings) {
    doc["findings"].push_back({{"obligation", to_string(finding.obligation)},
                               {"met", finding.met},
                               {"detail", finding.detail}});
  }
  return doc;
}

json to_json(const DeletionReport& report) {
  json doc;
  doc["subject"] = report.subject;
  doc["stores"] = json::array();
  for (const auto& entry : report.entries) {
    doc["stores"].push_back(
        {{"port", entry.port}, {"store", entry.store}, {"rows_removed", entry.rows_removed}});
  }
  return doc;
}

json to_json(const ContractReport& report) {
  json doc;
  doc["output_port"] = report.output_port.str();
  doc["evaluated_at"] = report.evaluated_at;
  doc["alert_raised"] = report.alert_raised;
  doc["results"] = json::array();
  for (const auto& result : report.results) {
    json item;
    item["owner"] = result.owner.str();
    item["kind"] = to_string(result.expectation.kind);
    item["pass"] = result.pass;
    if (!result.detail.empty()) item["detail"] = result.detail;
    doc["results"].push_back(std::move(item));
  }
  return doc;
}

json to_json(const std::vector<SloResult>& results) {
  json doc = json::array();
  for (const auto& result : results) {
    json item;
    item["kind"] = to_string(result.slo.kind);
    item["threshold"] = result.slo.threshold;
    item["observed"] = result.observed;
    item["pass"] = result.pass;
    if (!result.detail.empty()) item["detail"] = result.detail;
    doc.push_back(std::move(item));
  }
  return doc;
}

json to_json(const ValidationReport& report) {
  json doc = json::array();
  for (const auto& finding : report) {
    doc.push_back({{"product", finding.product_id}, {"detail", finding.detail}});
  }
  return doc;
}

json to_json(const RemovalReport& report) {
  return {{"removed", report.removed_id}, {"dangling_consumers", report.dangling_consumers}};
}

json to_json(const RowSet& rows) {
  json doc;
  doc["columns"] = rows.columns;
  doc["rows"] = rows.rows;
  return doc;
}

json to_json(const Denial& denial) {
  return {{"denied", true}, {"reason", denial.reason}, {"decision", to_json(denial.decision)}};
}

json to_json(const CatalogEntry& entry) {
  json doc;
  doc["product"] = entry.product_id;
  doc["archetype"] = to_string(entry.archetype);
  doc["description"] = entry.description;
  doc["output_ports"] = json::array();
  for (const auto& port : entry.ports) {
    json slos = json::array();
    for (const auto& slo : port.slos) {
      slos.push_back({{"kind", to_string(slo.kind)}, {"threshold", slo.threshold}});
    }
    doc["output_ports"].push_back({{"id", port.id},
                                   {"interface", to_string(port.interface_type)},
                                   {"effective_labels", port.effective_labels},
                                   {"slos", std::move(slos)}});
  }
  return doc;
}

Subject subject_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("user") || !doc["user"].is_string()) {
    throw MeshError(ErrorCode::kInvalidArgument, "subject must be an object with a 'user' field");
  }
  Subject subject;
  subject.user = doc["user"].get<std::string>();
  if (doc.contains("roles")) {
    for (const auto& role : doc["roles"]) subject.roles.insert(role.get<std::string>());
  }
  if (doc.contains("domain") && doc["domain"].is_string()) {
    subject.domain = doc["domain"].get<std::string>();
  }
  if (doc.contains("attrs")) {
    for (const auto& [key, value] : doc["attrs"].items()) {
      subject.attrs[key] = value.is_boolean() ? value.get<bool>() : false;
    }
  }
  return subject;
}

}  // namespace mesh
