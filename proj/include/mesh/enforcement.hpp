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
#include <string>
#include <variant>
#include <vector>

#include "mesh/classification.hpp"
#include "mesh/crypto.hpp"
#include "mesh/csv.hpp"
#include "mesh/mesh_graph.hpp"
#include "mesh/policy.hpp"

namespace mesh {

// A policy-engine refusal, carried as a value: enforcement mechanisms never
// disagree with evaluate(), they just wrap its decision.
struct Denial {
  std::string reason;
  Decision decision;
};

// ---------------------------------------------------------------------------
// Token mechanism: a signed capability the client presents directly to
// storage. Wire format (normative):
//   base64url(canonical-JSON payload) "." base64url(HMAC-SHA-256(payload))
// with unpadded URL-safe base64 and the platform secret as MAC key.
// ---------------------------------------------------------------------------

inline constexpr std::int64_t kDefaultTokenTtlSeconds = 300;

struct TokenPayload {
  std::string subject;
  std::string product;
  std::string port;
  Action action = Action::kRead;
  std::int64_t issued_at = 0;
  std::int64_t expires_at = 0;
  std::string nonce;  // 128-bit, hex

  bool operator==(const TokenPayload&) const = default;
};

std::string token_payload_canonical(const TokenPayload& payload);

struct AccessToken {
  TokenPayload payload;
  std::string encoded;  // wire form
};

AccessToken sign_token(const TokenPayload& payload, const crypto::Bytes& secret);

enum class TokenVerification { kValid, kExpired, kSignatureInvalid, kResourceMismatch, kMalformed };
const char* to_string(TokenVerification v);

// Pure: platform secret, expiry (now >= expires_at is expired) and resource
// binding. Signature is checked before anything the payload claims.
TokenVerification verify_token(const std::string& token, const std::string& product,
                               const std::string& port, std::int64_t now,
                               const crypto::Bytes& secret);

struct TokenGrant {
  AccessToken token;
  // How to authenticate directly with the underlying storage.
  std::string address;
  InterfaceType interface_type = InterfaceType::kBlob;
};

// Policy-checked issuance. Throws kUntagged for untagged ports, kNotFound for
// unknown resources; a deny decision returns Denial, never a token.
std::variant<TokenGrant, Denial> issue_token(const Subject& subject, const MeshPortRef& resource,
                                             Action action, std::int64_t ttl_seconds,
                                             std::int64_t now, const crypto::Bytes& secret,
                                             const MeshGraph& graph,
                                             const ClassificationStore& classifications,
                                             const std::vector<Policy>& policies);

// ---------------------------------------------------------------------------
// Gateway mechanism: a query proxy enforcing column-level ABAC on sql ports.
// Grammar (docs/gateway.md): SELECT cols|* FROM product:port [WHERE col op lit]
// ---------------------------------------------------------------------------

struct QueryPredicate {
  std::string column;
  std::string op;  // = != < >
  std::string literal;

  bool operator==(const QueryPredicate&) const = default;
};

struct Query {
  bool star = false;
  std::vector<std::string> columns;  // empty iff star
  std::string product;
  std::string port;
  std::optional<QueryPredicate> where;

  bool operator==(const Query&) const = default;
};

// Throws MeshError(kParse) with a character position.
Query parse_query(const std::string& text);

struct RowSet {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

using OutputPathFn =
    std::function<std::filesystem::path(const DataProduct&, const OutputPort&)>;

// Parses, authorizes column-by-column (star expands to the full schema; every
// column must allow, a denial names each denied column), then reads rows from
// the port's CSV store with the predicate applied.
std::variant<RowSet, Denial> gateway_query(const Subject& subject, const std::string& query_text,
                                           const MeshGraph& graph,
                                           const ClassificationStore& classifications,
                                           const std::vector<Policy>& policies,
                                           const OutputPathFn& output_path);

// Predicate application with schema-aware comparison (numeric for int/float
// columns, lexicographic otherwise).
RowSet apply_query(const Query& query, const std::vector<Column>& schema, const CsvTable& table);

// Every column a query touches, deduplicated: the select list (star expands
// to the schema) plus the predicate column.
std::vector<std::string> query_columns(const Query& query, const OutputPort& port);

// Resolution step shared by every mechanism: binds the request to a concrete
// port, attaches its effective labels, and expands a port-level request on a
// schema-bearing port to the full column set so column-scoped rules bind all
// mechanisms identically. Throws kNotFound for unknown resources.
AccessRequest resolve_access_request(const Subject& subject, Action action, const MeshGraph& graph,
                                     const ClassificationStore& classifications,
                                     const std::string& product, const std::string& port,
                                     std::vector<std::string> columns);

// ---------------------------------------------------------------------------
// Encryption-at-rest mechanism: producers encrypt, the key service hands out
// decryption keys to allowed subjects. One active data key per port.
// Encrypted file layout: nonce(12) || ciphertext || tag(16).
// ---------------------------------------------------------------------------

struct KeyRecord {
  std::string id;
  PortRef port;
  crypto::Bytes material;  // 256-bit; never logged, never serialized in state
  std::int64_t created_at = 0;

  bool operator==(const KeyRecord&) const = default;
};

crypto::Bytes encrypt_dataset(const KeyRecord& key, const crypto::Bytes& plaintext);
std::optional<crypto::Bytes> decrypt_dataset(const crypto::Bytes& ciphertext,
                                             const crypto::Bytes& key_material);

}  // namespace mesh
