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

#include "mesh/service.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>

#include "mesh/csv.hpp"
#include "mesh/descriptor.hpp"
#include "mesh/errors.hpp"

namespace mesh {

using nlohmann::json;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value != nullptr ? std::string(value) : fallback;
}

std::int64_t file_mtime_unix(const std::filesystem::path& path) {
  // Portable file_clock -> unix seconds without clock_cast.
  auto ftime = std::filesystem::last_write_time(path);
  auto delta = ftime - std::filesystem::file_time_type::clock::now();
  auto sys = std::chrono::system_clock::now() +
             std::chrono::duration_cast<std::chrono::system_clock::duration>(delta);
  return std::chrono::duration_cast<std::chrono::seconds>(sys.time_since_epoch()).count();
}

json matched_rule_json(const Decision& decision) {
  if (!decision.matched_rule) return nullptr;
  return json{{"policy", decision.matched_rule->policy},
              {"rule_index", decision.matched_rule->rule_index}};
}

}  // namespace

MeshService::MeshService(Options options)
    : home_(options.home.empty() ? std::filesystem::path(env_or("MESH_HOME", "")) : options.home),
      clock_(options.clock ? std::move(options.clock)
                           : [] { return static_cast<std::int64_t>(std::time(nullptr)); }),
      log_((home_.empty() ? std::filesystem::path(".") : home_) / "events.jsonl"),
      keystore_path_((home_.empty() ? std::filesystem::path(".") : home_) / "keys.json") {
  if (home_.empty()) {
    throw MeshError(ErrorCode::kInvalidArgument,
                    "state directory required: pass Options.home or set MESH_HOME");
  }
  auto secret_hex = options.secret_hex.empty() ? env_or("MESH_SECRET", "") : options.secret_hex;
  auto secret = crypto::hex_decode(secret_hex);
  if (!secret || secret->size() != crypto::kKeyBytes) {
    throw MeshError(ErrorCode::kInvalidArgument,
                    "platform secret required: set MESH_SECRET to 64 hex characters (256 bits)");
  }
  secret_ = std::move(*secret);

  std::filesystem::create_directories(home_);
  if (std::filesystem::exists(keystore_path_)) {
    std::ifstream in(keystore_path_, std::ios::binary);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw MeshError(ErrorCode::kCorruptLog,
                      "keystore '" + keystore_path_.string() + "' is not a JSON object");
    }
    for (const auto& [key, value] : doc.items()) keystore_[key] = value.get<std::string>();
  }

  auto events = log_.read_all();
  state_ = replay(events, keystore_);
  next_seq_ = events.size() + 1;
}

EventRecord MeshService::commit(const std::string& kind, const std::string& actor, json payload) {
  EventRecord event;
  event.seq = next_seq_;
  event.timestamp = clock_();
  event.actor = actor;
  event.kind = kind;
  event.payload = std::move(payload);

  MeshState next = state_;
  apply_event(next, event, keystore_);  // throws -> live state untouched
  log_.append(event);                   // durable before visible
  state_ = std::move(next);
  ++next_seq_;
  return event;
}

void MeshService::persist_keystore() {
  json doc(keystore_);
  std::ofstream out(keystore_path_, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw MeshError(ErrorCode::kIo, "cannot write keystore '" + keystore_path_.string() + "'");
  }
  out << doc.dump(2) << "\n";
}

// --- data products -----------------------------------------------------------

std::string MeshService::register_product(const std::string& descriptor_text,
                                          const std::string& actor) {
  auto descriptor = parse_descriptor(descriptor_text);
  auto errors = validate_descriptor(descriptor);
  if (!errors.empty()) {
    throw MeshError(ErrorCode::kInvalidDescriptor,
                    "descriptor invalid: " + errors.front() +
                        (errors.size() > 1
                             ? " (+" + std::to_string(errors.size() - 1) + " more)"
                             : ""));
  }
  std::unique_lock lock(mutex_);
  commit(event_kind::kProductRegistered, actor, {{"descriptor", descriptor_to_json(descriptor)}});
  return descriptor.id;
}

RemovalReport MeshService::decommission_product(const std::string& id, bool force,
                                                const std::string& actor) {
  std::unique_lock lock(mutex_);
  state_.graph.product_or_throw(id);
  auto consumers = state_.graph.direct_downstream(id);
  commit(event_kind::kProductDecommissioned, actor,
         {{"id", id},
          {"force", force},
          {"dangling_consumers", std::vector<std::string>(consumers.begin(), consumers.end())}});
  RemovalReport report;
  report.removed_id = id;
  report.dangling_consumers.assign(consumers.begin(), consumers.end());
  return report;
}

std::vector<DataProduct> MeshService::list_products() const {
  std::shared_lock lock(mutex_);
  std::vector<DataProduct> out;
  for (const auto& [_, product] : state_.graph.products()) out.push_back(product);
  return out;
}

DataProduct MeshService::get_product(const std::string& id) const {
  std::shared_lock lock(mutex_);
  return state_.graph.product_or_throw(id);
}

std::set<std::string> MeshService::lineage(const std::string& id,
                                           LineageDirection direction) const {
  std::shared_lock lock(mutex_);
  return state_.graph.lineage(id, direction);
}

ValidationReport MeshService::validate_mesh() const {
  std::shared_lock lock(mutex_);
  return state_.graph.validate();
}

// --- classification ----------------------------------------------------------

SensitivityLabel MeshService::define_label(const std::string& name,
                                           const std::set<Obligation>& obligations,
                                           const std::string& description,
                                           const std::string& actor) {
  std::unique_lock lock(mutex_);
  json obligation_names = json::array();
  for (auto o : obligations) obligation_names.push_back(to_string(o));
  commit(event_kind::kLabelDefined, actor,
         {{"name", name}, {"obligations", obligation_names}, {"description", description}});
  return state_.classifications.labels.at(name);
}

std::vector<SensitivityLabel> MeshService::list_labels() const {
  std::shared_lock lock(mutex_);
  std::vector<SensitivityLabel> out;
  for (const auto& [_, label] : state_.classifications.labels) out.push_back(label);
  return out;
}

ClassificationState MeshService::tag_port(const PortRef& ref, const std::set<std::string>& labels,
                                          const std::string& actor) {
  std::unique_lock lock(mutex_);
  commit(event_kind::kPortTagged, actor, {{"port", ref.str()}, {"labels", labels}});
  return state_.classifications.states.at(ref.str());
}

ClassificationState MeshService::classification_of(const PortRef& ref) const {
  std::shared_lock lock(mutex_);
  const auto* state = state_.classifications.find_state(ref);
  if (state == nullptr) {
    throw MeshError(ErrorCode::kNotFound, "unknown output port '" + ref.str() + "'");
  }
  return *state;
}

std::map<std::string, std::set<std::string>> MeshService::effective_labels() const {
  std::shared_lock lock(mutex_);
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [key, state] : state_.classifications.states) {
    out[key] = state_.classifications.effective(state);
  }
  return out;
}

OverrideRequest MeshService::request_override(const PortRef& ref,
                                              const std::set<std::string>& labels,
                                              const std::string& justification,
                                              const std::string& actor) {
  std::unique_lock lock(mutex_);
  std::string id = "ovr-" + std::to_string(next_seq_);
  commit(event_kind::kOverrideRequested, actor,
         {{"id", id}, {"port", ref.str()}, {"labels", labels}, {"justification", justification}});
  return state_.classifications.overrides.at(id);
}

OverrideRequest MeshService::review_override(const std::string& request_id, ReviewVerdict verdict,
                                             const std::string& reviewer) {
  std::unique_lock lock(mutex_);
  commit(event_kind::kOverrideReviewed, reviewer,
         {{"id", request_id},
          {"verdict", verdict == ReviewVerdict::kApprove ? "approve" : "reject"},
          {"reviewer", reviewer}});
  return state_.classifications.overrides.at(request_id);
}

std::vector<OverrideRequest> MeshService::list_overrides() const {
  std::shared_lock lock(mutex_);
  std::vector<OverrideRequest> out;
  for (const auto& [_, request] : state_.classifications.overrides) out.push_back(request);
  return out;
}

ComplianceReport MeshService::check_obligations(const PortRef& ref) const {
  std::shared_lock lock(mutex_);
  return mesh::check_obligations(state_.graph, state_.classifications, ref);
}

DeletionReport MeshService::forget_subject(const std::string& subject_id,
                                           const std::string& actor) {
  std::unique_lock lock(mutex_);
  auto report = mesh::forget_subject(state_.graph, state_.classifications, subject_id,
                                     store_paths());
  json stores = json::array();
  for (const auto& entry : report.entries) {
    stores.push_back({{"port", entry.port}, {"rows_removed", entry.rows_removed}});
  }
  // The subject id itself stays out of the append-only journal.
  commit(event_kind::kSubjectForgotten, actor,
         {{"subject_digest", crypto::sha256_hex(subject_id)}, {"stores", stores}});
  return report;
}

// --- policies ----------------------------------------------------------------

std::string MeshService::apply_policy(const std::string& policy_text, const std::string& actor) {
  auto policy = parse_policy(policy_text);
  std::unique_lock lock(mutex_);
  commit(event_kind::kPolicyApplied, actor,
         {{"name", policy.name}, {"text", serialize_policy(policy)}});
  return policy.name;
}

std::vector<Policy> MeshService::list_policies() const {
  std::shared_lock lock(mutex_);
  return policy_list_unlocked();
}

std::vector<Policy> MeshService::policy_list_unlocked() const {
  std::vector<Policy> out;
  for (const auto& [_, policy] : state_.policies) out.push_back(policy);
  return out;
}

Decision MeshService::decide_unlocked(const Subject& subject, Action action,
                                      const std::string& product, const std::string& port,
                                      const std::vector<std::string>& columns,
                                      bool explain_mode) const {
  auto request = resolve_access_request(subject, action, state_.graph, state_.classifications,
                                        product, port, columns);
  auto policies = policy_list_unlocked();
  return explain_mode ? explain(request, policies) : evaluate(request, policies);
}

Decision MeshService::decide(const Subject& subject, Action action, const std::string& product,
                             const std::string& port, const std::vector<std::string>& columns,
                             bool explain_mode) const {
  std::shared_lock lock(mutex_);
  return decide_unlocked(subject, action, product, port, columns, explain_mode);
}

nlohmann::json MeshService::compile_policy(const std::string& policy_name) const {
  std::shared_lock lock(mutex_);
  auto it = state_.policies.find(policy_name);
  if (it == state_.policies.end()) {
    throw MeshError(ErrorCode::kNotFound, "unknown policy '" + policy_name + "'");
  }
  return native_statements_to_json(
      compile_native(it->second, state_.graph, NativeTarget::kBlobStore));
}

// --- enforcement ---------------------------------------------------------------

void MeshService::audit_decision(const std::string& actor, const Subject& subject,
                                 const std::string& product, const std::string& port,
                                 Action action, const std::string& mode,
                                 const Decision& decision) {
  commit(event_kind::kAccessDecided, actor,
         {{"subject", subject.user},
          {"product", product},
          {"port", port},
          {"action", to_string(action)},
          {"mode", mode},
          {"effect", to_string(decision.effect)},
          {"matched_rule", matched_rule_json(decision)}});
}

std::variant<TokenGrant, Denial> MeshService::issue_token_unlocked(const Subject& subject,
                                                                   const MeshPortRef& resource,
                                                                   Action action,
                                                                   std::int64_t ttl_seconds,
                                                                   const std::string& actor) {
  auto outcome = mesh::issue_token(subject, resource, action, ttl_seconds, clock_(), secret_,
                                   state_.graph, state_.classifications, policy_list_unlocked());
  const Decision* decision = nullptr;
  if (const auto* denial = std::get_if<Denial>(&outcome)) {
    decision = &denial->decision;
  }
  if (decision != nullptr) {
    audit_decision(actor, subject, resource.product_id, resource.port_id, action, "token",
                   *decision);
    return outcome;
  }
  const auto& grant = std::get<TokenGrant>(outcome);
  audit_decision(actor, subject, resource.product_id, resource.port_id, action, "token",
                 decide_unlocked(subject, action, resource.product_id, resource.port_id, {},
                                 false));
  commit(event_kind::kTokenIssued, actor,
         {{"subject", subject.user},
          {"product", resource.product_id},
          {"port", resource.port_id},
          {"action", to_string(action)},
          {"expires_at", grant.token.payload.expires_at}});
  return outcome;
}

std::variant<TokenGrant, Denial> MeshService::issue_token(const Subject& subject,
                                                          const MeshPortRef& resource,
                                                          Action action, std::int64_t ttl_seconds,
                                                          const std::string& actor) {
  std::unique_lock lock(mutex_);
  return issue_token_unlocked(subject, resource, action, ttl_seconds, actor);
}

TokenVerification MeshService::verify_token(const std::string& token, const std::string& product,
                                            const std::string& port,
                                            std::optional<std::int64_t> now) const {
  return mesh::verify_token(token, product, port, now.value_or(clock_()), secret_);
}

std::variant<RowSet, Denial> MeshService::gateway_query(const Subject& subject,
                                                        const std::string& query_text,
                                                        const std::string& actor) {
  std::unique_lock lock(mutex_);
  auto policies = policy_list_unlocked();
  auto outcome = mesh::gateway_query(subject, query_text, state_.graph, state_.classifications,
                                     policies, store_paths().output_path);
  auto query = parse_query(query_text);
  if (const auto* denial = std::get_if<Denial>(&outcome)) {
    audit_decision(actor, subject, query.product, query.port, Action::kRead, "gateway",
                   denial->decision);
  } else {
    const auto* port = state_.graph.find_output_port({query.product, query.port});
    auto request = resolve_access_request(subject, Action::kRead, state_.graph,
                                          state_.classifications, query.product, query.port,
                                          query_columns(query, *port));
    audit_decision(actor, subject, query.product, query.port, Action::kRead, "gateway",
                   evaluate(request, policies));
  }
  return outcome;
}

std::string MeshService::ensure_port_key_unlocked(const PortRef& ref, const std::string& actor) {
  for (const auto& [id, key] : state_.keys) {
    if (key.port == ref) return id;
  }
  std::string key_id = "key-" + std::to_string(next_seq_);
  auto material = crypto::random_bytes(crypto::kKeyBytes);
  auto material_hex = crypto::hex_encode(material);
  keystore_[key_id] = material_hex;
  persist_keystore();  // material durable before the event referencing it
  try {
    commit(event_kind::kKeyCreated, actor,
           {{"key_id", key_id},
            {"port", ref.str()},
            {"material_digest", crypto::sha256_hex(material_hex)}});
  } catch (...) {
    keystore_.erase(key_id);
    persist_keystore();
    throw;
  }
  return key_id;
}

std::pair<std::string, crypto::Bytes> MeshService::encrypt_port_data(const PortRef& ref,
                                                                     const crypto::Bytes& plaintext,
                                                                     const std::string& actor) {
  std::unique_lock lock(mutex_);
  const auto& product = state_.graph.product_or_throw(ref.product_id);
  const auto* port = state_.graph.find_output_port({ref.product_id, ref.port_id});
  if (port == nullptr) {
    throw MeshError(ErrorCode::kNotFound, "unknown output port '" + ref.str() + "'");
  }
  if (!port->encryption_enabled) {
    throw MeshError(ErrorCode::kEncryptionDisabled,
                    "port '" + ref.str() + "' does not have encryption enabled");
  }
  auto key_id = ensure_port_key_unlocked(ref, actor);
  auto ciphertext = encrypt_dataset(state_.keys.at(key_id), plaintext);

  auto path = output_store_path(product, *port);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw MeshError(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  }
  out.write(reinterpret_cast<const char*>(ciphertext.data()),
            static_cast<std::streamsize>(ciphertext.size()));
  return {key_id, ciphertext};
}

std::variant<crypto::Bytes, Denial> MeshService::request_key(const Subject& subject,
                                                             const std::string& key_id,
                                                             const std::string& actor) {
  std::unique_lock lock(mutex_);
  auto it = state_.keys.find(key_id);
  if (it == state_.keys.end()) {
    throw MeshError(ErrorCode::kNotFound, "unknown key '" + key_id + "'");
  }
  const auto& port = it->second.port;
  if (state_.classifications.untagged(port)) {
    throw MeshError(ErrorCode::kUntagged,
                    "port '" + port.str() +
                        "' is untagged; the platform refuses to process untagged data");
  }
  auto decision =
      decide_unlocked(subject, Action::kRead, port.product_id, port.port_id, {}, false);
  audit_decision(actor, subject, port.product_id, port.port_id, Action::kRead, "key", decision);
  if (decision.effect == Effect::kDeny) {
    return Denial{"policy denied read on '" + port.str() + "'; key withheld", std::move(decision)};
  }
  commit(event_kind::kKeyHandedOut, actor, {{"key_id", key_id}, {"subject", subject.user}});
  return state_.keys.at(key_id).material;
}

// --- access workflow -----------------------------------------------------------

std::optional<MeshService::AccessMode> MeshService::access_mode_from_string(const std::string& s) {
  if (s == "gateway") return AccessMode::kGateway;
  if (s == "token") return AccessMode::kToken;
  if (s == "key") return AccessMode::kKey;
  return std::nullopt;
}

std::variant<MeshService::AccessGrant, Denial> MeshService::submit_access_request(
    const Subject& subject, const MeshPortRef& resource, Action action, AccessMode mode,
    const std::string& actor) {
  std::unique_lock lock(mutex_);
  const auto* port = state_.graph.find_output_port(resource);
  if (port == nullptr) {
    throw MeshError(ErrorCode::kNotFound,
                    "unknown output port '" + resource.product_id + ":" + resource.port_id + "'");
  }
  PortRef ref{resource.product_id, resource.port_id};

  if (mode == AccessMode::kToken) {
    auto outcome = issue_token_unlocked(subject, resource, action, kDefaultTokenTtlSeconds, actor);
    if (auto* denial = std::get_if<Denial>(&outcome)) return std::move(*denial);
    auto& grant = std::get<TokenGrant>(outcome);
    AccessGrant result;
    result.mode = "token";
    result.decision = decide_unlocked(subject, action, ref.product_id, ref.port_id, {}, false);
    result.token = std::move(grant);
    result.address = result.token->address;
    return result;
  }

  if (state_.classifications.untagged(ref)) {
    throw MeshError(ErrorCode::kUntagged,
                    "port '" + ref.str() +
                        "' is untagged; the platform refuses to process untagged data");
  }
  auto decision = decide_unlocked(subject, action, ref.product_id, ref.port_id, {}, false);
  const char* mode_name = mode == AccessMode::kGateway ? "gateway" : "key";
  audit_decision(actor, subject, ref.product_id, ref.port_id, action, mode_name, decision);
  if (decision.effect == Effect::kDeny) {
    return Denial{"policy denied " + std::string(to_string(action)) + " on '" + ref.str() + "'",
                  std::move(decision)};
  }

  AccessGrant result;
  result.decision = decision;
  result.address = port->address;
  if (mode == AccessMode::kGateway) {
    result.mode = "gateway";  // session approved; rows flow through the query op
    return result;
  }
  if (!port->encryption_enabled) {
    throw MeshError(ErrorCode::kEncryptionDisabled,
                    "port '" + ref.str() + "' is not encrypted; key mode unavailable");
  }
  result.mode = "key";
  result.key_id = ensure_port_key_unlocked(ref, actor);
  return result;
}

// --- catalog / contracts ---------------------------------------------------------

std::vector<CatalogEntry> MeshService::search_catalog(const std::string& query,
                                                      const std::string& label) const {
  std::shared_lock lock(mutex_);
  return mesh::search_catalog(state_, query, label);
}

ContractReport MeshService::run_contracts(const PortRef& output_port, const std::string& actor) {
  std::unique_lock lock(mutex_);
  const auto& product = state_.graph.product_or_throw(output_port.product_id);
  const auto* port = state_.graph.find_output_port({output_port.product_id, output_port.port_id});
  if (port == nullptr) {
    throw MeshError(ErrorCode::kNotFound, "unknown output port '" + output_port.str() + "'");
  }
  auto path = output_store_path(product, *port);
  if (!std::filesystem::exists(path)) {
    throw MeshError(ErrorCode::kIo, "store '" + path.string() + "' is not readable");
  }
  auto table = read_csv_file(path);
  auto report = mesh::run_contracts(output_port, state_.contracts, table, file_mtime_unix(path),
                                    clock_());
  commit(event_kind::kContractRun, actor,
         {{"port", output_port.str()},
          {"violations", report.violations()},
          {"alert_raised", report.alert_raised}});
  return report;
}

std::vector<SloResult> MeshService::check_slo(const PortRef& ref,
                                              const ObservedMetrics& observed) const {
  std::shared_lock lock(mutex_);
  state_.graph.product_or_throw(ref.product_id);
  const auto* port = state_.graph.find_output_port({ref.product_id, ref.port_id});
  if (port == nullptr) {
    throw MeshError(ErrorCode::kNotFound, "unknown output port '" + ref.str() + "'");
  }
  return mesh::check_slo(*port, observed, clock_());
}

// --- introspection ----------------------------------------------------------------

std::string MeshService::state_hash() const {
  std::shared_lock lock(mutex_);
  return state_.state_hash();
}

nlohmann::json MeshService::state_snapshot() const {
  std::shared_lock lock(mutex_);
  return state_.snapshot();
}

std::vector<EventRecord> MeshService::events() const {
  std::shared_lock lock(mutex_);
  return log_.read_all();
}

MeshState MeshService::state_copy() const {
  std::shared_lock lock(mutex_);
  return state_;
}

std::filesystem::path MeshService::output_store_path(const DataProduct& product,
                                                     const OutputPort& port) const {
  std::filesystem::path address(port.address);
  (void)product;
  return address.is_absolute() ? address : home_ / address;
}

std::filesystem::path MeshService::copy_store_path(const DataProduct& product,
                                                   const InputPort& input) const {
  return home_ / "copies" / product.domain / product.name() / (input.id + ".csv");
}

StorePaths MeshService::store_paths() const {
  StorePaths paths;
  paths.output_path = [this](const DataProduct& product, const OutputPort& port) {
    return output_store_path(product, port);
  };
  paths.copy_path = [this](const DataProduct& product, const InputPort& input) {
    return copy_store_path(product, input);
  };
  return paths;
}

}  // namespace mesh
