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
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "mesh/state.hpp"

namespace mesh {

// The operator app: event-sourced control-plane state behind a single-writer
// transaction. Every mutation is validated against a scratch copy of the
// state, made durable in the journal, and only then swapped in; readers
// always see a consistent snapshot. The HTTP API, the CLI and the python
// bindings all drive this one class, so their state transitions are
// identical by construction.
class MeshService {
 public:
  struct Options {
    std::filesystem::path home;         // falls back to $MESH_HOME
    std::string secret_hex;             // falls back to $MESH_SECRET (64 hex chars)
    std::function<std::int64_t()> clock;  // unix seconds; defaults to system time
  };

  explicit MeshService(Options options);

  // --- data products --------------------------------------------------------
  std::string register_product(const std::string& descriptor_text, const std::string& actor);
  RemovalReport decommission_product(const std::string& id, bool force, const std::string& actor);
  std::vector<DataProduct> list_products() const;
  DataProduct get_product(const std::string& id) const;
  std::set<std::string> lineage(const std::string& id, LineageDirection direction) const;
  ValidationReport validate_mesh() const;

  // --- classification -------------------------------------------------------
  SensitivityLabel define_label(const std::string& name, const std::set<Obligation>& obligations,
                                const std::string& description, const std::string& actor);
  std::vector<SensitivityLabel> list_labels() const;
  ClassificationState tag_port(const PortRef& ref, const std::set<std::string>& labels,
                               const std::string& actor);
  ClassificationState classification_of(const PortRef& ref) const;
  std::map<std::string, std::set<std::string>> effective_labels() const;
  OverrideRequest request_override(const PortRef& ref, const std::set<std::string>& labels,
                                   const std::string& justification, const std::string& actor);
  OverrideRequest review_override(const std::string& request_id, ReviewVerdict verdict,
                                  const std::string& reviewer);
  std::vector<OverrideRequest> list_overrides() const;
  ComplianceReport check_obligations(const PortRef& ref) const;
  DeletionReport forget_subject(const std::string& subject_id, const std::string& actor);

  // --- policies -------------------------------------------------------------
  std::string apply_policy(const std::string& policy_text, const std::string& actor);
  std::vector<Policy> list_policies() const;
  Decision decide(const Subject& subject, Action action, const std::string& product,
                  const std::string& port, const std::vector<std::string>& columns,
                  bool explain_mode) const;
  nlohmann::json compile_policy(const std::string& policy_name) const;

  // --- enforcement ----------------------------------------------------------
  std::variant<TokenGrant, Denial> issue_token(const Subject& subject, const MeshPortRef& resource,
                                               Action action, std::int64_t ttl_seconds,
                                               const std::string& actor);
  TokenVerification verify_token(const std::string& token, const std::string& product,
                                 const std::string& port,
                                 std::optional<std::int64_t> now = std::nullopt) const;
  std::variant<RowSet, Denial> gateway_query(const Subject& subject, const std::string& query_text,
                                             const std::string& actor);
  // Encrypts with the port's active data key (created on first use), writes
  // the blob to the port's store and returns (key id, ciphertext bytes).
  std::pair<std::string, crypto::Bytes> encrypt_port_data(const PortRef& ref,
                                                          const crypto::Bytes& plaintext,
                                                          const std::string& actor);
  std::variant<crypto::Bytes, Denial> request_key(const Subject& subject,
                                                  const std::string& key_id,
                                                  const std::string& actor);

  // --- access workflow ------------------------------------------------------
  enum class AccessMode { kGateway, kToken, kKey };

  struct AccessGrant {
    std::string mode;
    Decision decision;
    std::optional<TokenGrant> token;   // mode token
    std::optional<std::string> key_id;  // mode key
    std::string address;
  };

  std::variant<AccessGrant, Denial> submit_access_request(const Subject& subject,
                                                          const MeshPortRef& resource,
                                                          Action action, AccessMode mode,
                                                          const std::string& actor);

  // --- catalog / contracts ---------------------------------------------------
  std::vector<CatalogEntry> search_catalog(const std::string& query,
                                           const std::string& label) const;
  ContractReport run_contracts(const PortRef& output_port, const std::string& actor);
  std::vector<SloResult> check_slo(const PortRef& ref, const ObservedMetrics& observed) const;

  // --- introspection ---------------------------------------------------------
  std::string state_hash() const;
  nlohmann::json state_snapshot() const;
  std::vector<EventRecord> events() const;
  MeshState state_copy() const;

  std::filesystem::path output_store_path(const DataProduct& product,
                                          const OutputPort& port) const;
  std::filesystem::path copy_store_path(const DataProduct& product, const InputPort& input) const;
  StorePaths store_paths() const;
  const std::filesystem::path& home() const { return home_; }
  std::int64_t now() const { return clock_(); }

  static std::optional<AccessMode> access_mode_from_string(const std::string& s);

 private:
  // Single-writer transaction: validate on a copy, persist, swap.
  EventRecord commit(const std::string& kind, const std::string& actor, nlohmann::json payload);
  void persist_keystore();
  std::vector<Policy> policy_list_unlocked() const;
  Decision decide_unlocked(const Subject& subject, Action action, const std::string& product,
                           const std::string& port, const std::vector<std::string>& columns,
                           bool explain_mode) const;
  std::variant<TokenGrant, Denial> issue_token_unlocked(const Subject& subject,
                                                        const MeshPortRef& resource, Action action,
                                                        std::int64_t ttl_seconds,
                                                        const std::string& actor);
  std::string ensure_port_key_unlocked(const PortRef& ref, const std::string& actor);
  void audit_decision(const std::string& actor, const Subject& subject, const std::string& product,
                      const std::string& port, Action action, const std::string& mode,
                      const Decision& decision);

  std::filesystem::path home_;
  crypto::Bytes secret_;
  std::function<std::int64_t()> clock_;
  EventLog log_;
  std::filesystem::path keystore_path_;
  Keystore keystore_;
  MeshState state_;
  std::uint64_t next_seq_ = 1;
  mutable std::shared_mutex mutex_;
};

}  // namespace mesh
