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

#include "mesh/state.hpp"

#include <algorithm>
#include <cctype>

#include "mesh/crypto.hpp"
#include "mesh/descriptor.hpp"
#include "mesh/errors.hpp"

namespace mesh {

using nlohmann::json;

namespace {

std::set<std::string> to_string_set(const json& arr) {
  std::set<std::string> out;
  for (const auto& item : arr) out.insert(item.get<std::string>());
  return out;
}

std::set<Obligation> to_obligations(const json& arr) {
  std::set<Obligation> out;
  for (const auto& item : arr) {
    auto parsed = obligation_from_string(item.get<std::string>());
    if (parsed) out.insert(*parsed);
  }
  return out;
}

[[noreturn]] void corrupt(std::uint64_t seq, const std::string& why) {
  throw MeshError(ErrorCode::kCorruptLog,
                  "event " + std::to_string(seq) + " cannot apply: " + why);
}

// Registers the product plus everything registration implies: declared-label
// seeding, consumer contracts, and a propagation pass.
void apply_registration(MeshState& state, const DataProduct& product) {
  for (const auto& port : product.output_ports) {
    state.classifications.ensure_labels_registered(port.declared_labels);
  }
  for (const auto& input : product.input_ports) {
    if (const auto* ext = std::get_if<ExternalSourceRef>(&input.target)) {
      state.classifications.ensure_labels_registered(ext->manual_labels);
    }
  }
  state.graph.add_product(product);
  for (const auto& port : product.output_ports) {
    PortRef ref{product.id, port.id};
    auto& cls = state.classifications.states[ref.str()];
    cls.port = ref;
    cls.declared = port.declared_labels;
  }
  for (const auto& input : product.input_ports) {
    if (std::holds_alternative<MeshPortRef>(input.target) && !input.expectations.empty()) {
      auto contract =
          make_contract(state.graph, PortRef{product.id, input.id}.str(), product.id, input);
      state.contracts[contract.provider.product_id + ":" + contract.provider.port_id].push_back(
          std::move(contract));
    }
  }
  propagate(state.graph, state.classifications);
}

void apply_decommission(MeshState& state, const std::string& id, bool force) {
  state.graph.remove_product(id, force);
  // Contracts die with either side of the pair.
  for (auto it = state.contracts.begin(); it != state.contracts.end();) {
    if (it->first.starts_with(id + ":")) {
      it = state.contracts.erase(it);
      continue;
    }
    std::erase_if(it->second, [&](const RegisteredContract& c) {
      return c.consumer_input.product_id == id;
    });
    if (it->second.empty()) {
      it = state.contracts.erase(it);
    } else {
      ++it;
    }
  }
  std::erase_if(state.keys, [&](const auto& entry) {
    return entry.second.port.product_id == id;
  });
  propagate(state.graph, state.classifications);
}

}  // namespace

void apply_event(MeshState& state, const EventRecord& event, const Keystore& keystore) {
  try {
    if (event.kind == event_kind::kLabelDefined) {
      state.classifications.define_label(event.payload.at("name").get<std::string>(),
                                         to_obligations(event.payload.at("obligations")),
                                         event.payload.value("description", ""));
    } else if (event.kind == event_kind::kProductRegistered) {
      apply_registration(state, parse_descriptor(event.payload.at("descriptor").dump()));
    } else if (event.kind == event_kind::kProductDecommissioned) {
      apply_decommission(state, event.payload.at("id").get<std::string>(),
                         event.payload.at("force").get<bool>());
    } else if (event.kind == event_kind::kPortTagged) {
      tag_port(state.classifications, state.graph,
               parse_port_ref(event.payload.at("port").get<std::string>()),
               to_string_set(event.payload.at("labels")));
      propagate(state.graph, state.classifications);
    } else if (event.kind == event_kind::kOverrideRequested) {
      request_override(state.classifications, state.graph,
                       event.payload.at("id").get<std::string>(),
                       parse_port_ref(event.payload.at("port").get<std::string>()),
                       to_string_set(event.payload.at("labels")),
                       event.payload.value("justification", ""),
                       event.actor, event.timestamp);
      propagate(state.graph, state.classifications);
    } else if (event.kind == event_kind::kOverrideReviewed) {
      auto verdict = event.payload.at("verdict").get<std::string>() == "approve"
                         ? ReviewVerdict::kApprove
                         : ReviewVerdict::kReject;
      review_override(state.classifications, event.payload.at("id").get<std::string>(), verdict,
                      event.payload.at("reviewer").get<std::string>(), event.timestamp);
      propagate(state.graph, state.classifications);
    } else if (event.kind == event_kind::kPolicyApplied) {
      auto policy = parse_policy(event.payload.at("text").get<std::string>());
      state.policies[policy.name] = std::move(policy);
    } else if (event.kind == event_kind::kKeyCreated) {
      auto key_id = event.payload.at("key_id").get<std::string>();
      auto material_it = keystore.find(key_id);
      if (material_it == keystore.end()) {
        corrupt(event.seq, "keystore has no material for key '" + key_id + "'");
      }
      auto material = crypto::hex_decode(material_it->second);
      if (!material || material->size() != crypto::kKeyBytes) {
        corrupt(event.seq, "keystore material for '" + key_id + "' is not a 256-bit hex key");
      }
      if (crypto::sha256_hex(material_it->second) !=
          event.payload.at("material_digest").get<std::string>()) {
        corrupt(event.seq, "keystore material for '" + key_id + "' does not match its digest");
      }
      KeyRecord record;
      record.id = key_id;
      record.port = parse_port_ref(event.payload.at("port").get<std::string>());
      record.material = *material;
      record.created_at = event.timestamp;
      state.keys[key_id] = std::move(record);
    } else if (event.kind == event_kind::kAccessDecided ||
               event.kind == event_kind::kTokenIssued ||
               event.kind == event_kind::kKeyHandedOut ||
               event.kind == event_kind::kContractRun ||
               event.kind == event_kind::kSubjectForgotten) {
      // Audit records: facts about the world, not state transitions.
    } else {
      corrupt(event.seq, "unknown event kind '" + event.kind + "'");
    }
  } catch (const json::exception& e) {
    corrupt(event.seq, std::string("malformed payload: ") + e.what());
  }
}

MeshState replay(const std::vector<EventRecord>& events, const Keystore& keystore) {
  MeshState state;
  for (const auto& event : events) {
    apply_event(state, event, keystore);
  }
  return state;
}

json MeshState::snapshot() const {
  json doc;

  doc["products"] = json::object();
  for (const auto& [id, product] : graph.products()) {
    doc["products"][id] = descriptor_to_json(product);
  }

  doc["labels"] = json::object();
  for (const auto& [name, label] : classifications.labels) {
    json obligations = json::array();
    for (auto o : label.obligations) obligations.push_back(to_string(o));
    doc["labels"][name] = {{"obligations", obligations}, {"description", label.description}};
  }

  doc["classifications"] = json::object();
  for (const auto& [key, cls] : classifications.states) {
    json entry;
    entry["declared"] = cls.declared;
    entry["inherited"] = cls.inherited;
    entry["effective"] = classifications.effective(cls);
    if (cls.active_override) entry["active_override"] = *cls.active_override;
    if (cls.pending_override) entry["pending_override"] = *cls.pending_override;
    doc["classifications"][key] = std::move(entry);
  }

  doc["overrides"] = json::object();
  for (const auto& [id, request] : classifications.overrides) {
    doc["overrides"][id] = {
        {"port", request.port.str()},
        {"labels", request.labels},
        {"justification", request.justification},
        {"status", to_string(request.status)},
        {"requested_by", request.requested_by},
        {"reviewer", request.reviewer},
        {"requested_at", request.requested_at},
        {"reviewed_at", request.reviewed_at},
    };
  }

  doc["policies"] = json::object();
  for (const auto& [name, policy] : policies) {
    doc["policies"][name] = serialize_policy(policy);
  }

  doc["keys"] = json::object();
  for (const auto& [id, key] : keys) {
    doc["keys"][id] = {
        {"port", key.port.str()},
        {"material_digest", crypto::sha256_hex(crypto::hex_encode(key.material))},
        {"created_at", key.created_at},
    };
  }

  doc["contracts"] = json::object();
  for (const auto& [provider, list] : contracts) {
    json entries = json::array();
    for (const auto& contract : list) {
      json expectations = json::array();
      for (const auto& e : contract.expectations) {
        json entry;
        entry["kind"] = to_string(e.kind);
        switch (e.kind) {
          case ExpectationKind::kColumnPresent:
            entry["column"] = e.column;
            break;
          case ExpectationKind::kNonNullFraction:
            entry["column"] = e.column;
            entry["min_fraction"] = e.min_fraction;
            break;
          case ExpectationKind::kMinRowCount:
            entry["min_rows"] = e.min_rows;
            break;
          case ExpectationKind::kMaxStalenessSeconds:
            entry["max_seconds"] = e.max_seconds;
            break;
        }
        expectations.push_back(std::move(entry));
      }
      entries.push_back({{"id", contract.id},
                         {"consumer_input", contract.consumer_input.str()},
                         {"expectations", std::move(expectations)}});
    }
    doc["contracts"][provider] = std::move(entries);
  }

  return doc;
}

std::string MeshState::state_hash() const { return crypto::sha256_hex(snapshot().dump()); }

std::vector<CatalogEntry> search_catalog(const MeshState& state, const std::string& query,
                                         const std::string& label_filter) {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  const auto needle = lower(query);

  std::vector<CatalogEntry> entries;
  for (const auto& [id, product] : state.graph.products()) {
    if (!needle.empty() && lower(id).find(needle) == std::string::npos &&
        lower(product.description).find(needle) == std::string::npos) {
      continue;
    }
    CatalogEntry entry;
    entry.product_id = id;
    entry.archetype = product.archetype;
    entry.description = product.description;
    for (const auto& port : product.output_ports) {
      auto effective = state.classifications.effective(PortRef{id, port.id});
      if (!label_filter.empty() && !effective.contains(label_filter)) continue;
      entry.ports.push_back({port.id, port.interface_type, std::move(effective), port.slos});
    }
    if (!label_filter.empty() && entry.ports.empty()) continue;
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace mesh
