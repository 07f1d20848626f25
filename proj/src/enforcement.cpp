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

#include "mesh/enforcement.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <nlohmann/json.hpp>

#include "mesh/csv.hpp"
#include "mesh/errors.hpp"

namespace mesh {

using nlohmann::json;

const char* to_string(TokenVerification v) {
  switch (v) {
    case TokenVerification::kValid: return "valid";
    case TokenVerification::kExpired: return "expired";
    case TokenVerification::kSignatureInvalid: return "signature_invalid";
    case TokenVerification::kResourceMismatch: return "resource_mismatch";
    case TokenVerification::kMalformed: return "malformed";
  }
  return "";
}

std::string token_payload_canonical(const TokenPayload& payload) {
  json doc;
  doc["action"] = to_string(payload.action);
  doc["expires_at"] = payload.expires_at;
  doc["issued_at"] = payload.issued_at;
  doc["nonce"] = payload.nonce;
  doc["port"] = payload.port;
  doc["product"] = payload.product;
  doc["subject"] = payload.subject;
  return doc.dump();  // compact, keys sorted
}

AccessToken sign_token(const TokenPayload& payload, const crypto::Bytes& secret) {
  auto payload_bytes = crypto::to_bytes(token_payload_canonical(payload));
  auto mac = crypto::hmac_sha256(secret, payload_bytes);
  AccessToken token;
  token.payload = payload;
  token.encoded = crypto::base64url_encode(payload_bytes) + "." + crypto::base64url_encode(mac);
  return token;
}

TokenVerification verify_token(const std::string& token, const std::string& product,
                               const std::string& port, std::int64_t now,
                               const crypto::Bytes& secret) {
  auto dot = token.find('.');
  if (dot == std::string::npos || token.find('.', dot + 1) != std::string::npos) {
    return TokenVerification::kMalformed;
  }
  auto payload_bytes = crypto::base64url_decode(token.substr(0, dot));
  auto mac = crypto::base64url_decode(token.substr(dot + 1));
  if (!payload_bytes || !mac || mac->size() != 32) {
    return TokenVerification::kMalformed;
  }
  // The MAC covers the payload bytes as transmitted; verify before trusting
  // anything the payload claims.
  auto expected = crypto::hmac_sha256(secret, *payload_bytes);
  if (!crypto::constant_time_equal(expected, *mac)) {
    return TokenVerification::kSignatureInvalid;
  }
  json doc = json::parse(crypto::to_string(*payload_bytes), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return TokenVerification::kMalformed;
  for (const char* key : {"action", "expires_at", "issued_at", "nonce", "port", "product", "subject"}) {
    if (!doc.contains(key)) return TokenVerification::kMalformed;
  }
  if (!doc["product"].is_string() || !doc["port"].is_string() ||
      !doc["expires_at"].is_number_integer()) {
    return TokenVerification::kMalformed;
  }
  if (doc["product"].get<std::string>() != product || doc["port"].get<std::string>() != port) {
    return TokenVerification::kResourceMismatch;
  }
  if (now >= doc["expires_at"].get<std::int64_t>()) {
    return TokenVerification::kExpired;
  }
  return TokenVerification::kValid;
}

namespace {

void ensure_tagged(const ClassificationStore& classifications, const PortRef& ref) {
  if (classifications.untagged(ref)) {
    throw MeshError(ErrorCode::kUntagged,
                    "port '" + ref.str() +
                        "' is untagged; the platform refuses to process untagged data");
  }
}

}  // namespace

AccessRequest resolve_access_request(const Subject& subject, Action action, const MeshGraph& graph,
                                     const ClassificationStore& classifications,
                                     const std::string& product, const std::string& port,
                                     std::vector<std::string> columns) {
  const auto* output = graph.find_output_port({product, port});
  if (output == nullptr) {
    throw MeshError(ErrorCode::kNotFound, "unknown output port '" + product + ":" + port + "'");
  }
  AccessRequest request;
  request.subject = subject;
  request.action = action;
  request.resource.product = product;
  request.resource.port = port;
  if (columns.empty()) {
    for (const auto& column : output->schema) columns.push_back(column.name);
  }
  request.resource.columns = std::move(columns);
  request.resource.labels = classifications.effective(PortRef{product, port});
  return request;
}

std::variant<TokenGrant, Denial> issue_token(const Subject& subject, const MeshPortRef& resource,
                                             Action action, std::int64_t ttl_seconds,
                                             std::int64_t now, const crypto::Bytes& secret,
                                             const MeshGraph& graph,
                                             const ClassificationStore& classifications,
                                             const std::vector<Policy>& policies) {
  const auto* port = graph.find_output_port(resource);
  if (port == nullptr) {
    throw MeshError(ErrorCode::kNotFound,
                    "unknown output port '" + resource.product_id + ":" + resource.port_id + "'");
  }
  ensure_tagged(classifications, PortRef{resource.product_id, resource.port_id});

  auto request = resolve_access_request(subject, action, graph, classifications,
                                        resource.product_id, resource.port_id, {});
  auto decision = evaluate(request, policies);
  if (decision.effect == Effect::kDeny) {
    return Denial{"policy denied " + std::string(to_string(action)) + " on '" +
                      resource.product_id + ":" + resource.port_id + "'",
                  std::move(decision)};
  }

  TokenPayload payload;
  payload.subject = subject.user;
  payload.product = resource.product_id;
  payload.port = resource.port_id;
  payload.action = action;
  payload.issued_at = now;
  payload.expires_at = now + (ttl_seconds > 0 ? ttl_seconds : kDefaultTokenTtlSeconds);
  payload.nonce = crypto::hex_encode(crypto::random_bytes(16));

  TokenGrant grant;
  grant.token = sign_token(payload, secret);
  grant.address = port->address;
  grant.interface_type = port->interface_type;
  return grant;
}

// ---------------------------------------------------------------------------
// Gateway query parsing.
// ---------------------------------------------------------------------------

namespace {

struct QueryLexer {
  const std::string& text;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(std::size_t at, const std::string& message) const {
    throw MeshError(ErrorCode::kParse,
                    "query error at position " + std::to_string(at + 1) + ": " + message);
  }

  bool done() {
    skip_space();
    return pos >= text.size();
  }

  char peek() {
    skip_space();
    return pos < text.size() ? text[pos] : '\0';
  }

  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == '/';
  }

  std::string word(const char* what) {
    skip_space();
    std::size_t start = pos;
    while (pos < text.size() && word_char(text[pos])) ++pos;
    if (pos == start) fail(start, std::string("expected ") + what);
    return text.substr(start, pos - start);
  }

  void keyword(const char* kw) {
    skip_space();
    std::size_t start = pos;
    auto got = word("keyword");
    std::string upper = got;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (upper != kw) fail(start, "expected " + std::string(kw) + ", got '" + got + "'");
  }

  std::string literal() {
    skip_space();
    std::size_t start = pos;
    if (pos < text.size() && text[pos] == '\'') {
      ++pos;
      std::string value;
      while (pos < text.size() && text[pos] != '\'') value += text[pos++];
      if (pos >= text.size()) fail(start, "unterminated string literal");
      ++pos;
      return value;
    }
    return word("literal");
  }
};

}  // namespace

Query parse_query(const std::string& text) {
  QueryLexer lex{text};
  Query query;
  lex.keyword("SELECT");
  lex.skip_space();
  if (lex.peek() == '*') {
    ++lex.pos;
    query.star = true;
  } else {
    query.columns.push_back(lex.word("column name"));
    while (lex.peek() == ',') {
      ++lex.pos;
      query.columns.push_back(lex.word("column name"));
    }
  }
  lex.keyword("FROM");
  query.product = lex.word("product id");
  lex.skip_space();
  if (lex.peek() != ':') {
    lex.fail(lex.pos, "table reference must be '<domain>/<name>:<port>'");
  }
  ++lex.pos;
  query.port = lex.word("port name");
  if (!lex.done()) {
    lex.keyword("WHERE");
    QueryPredicate predicate;
    predicate.column = lex.word("column name");
    lex.skip_space();
    std::size_t op_at = lex.pos;
    if (lex.peek() == '!' ) {
      ++lex.pos;
      if (lex.pos >= lex.text.size() || lex.text[lex.pos] != '=') lex.fail(op_at, "expected !=");
      ++lex.pos;
      predicate.op = "!=";
    } else if (lex.peek() == '=' || lex.peek() == '<' || lex.peek() == '>') {
      predicate.op = std::string(1, lex.text[lex.pos]);
      ++lex.pos;
    } else {
      lex.fail(op_at, "expected comparison operator (=, !=, <, >)");
    }
    predicate.literal = lex.literal();
    query.where = std::move(predicate);
  }
  if (!lex.done()) {
    lex.fail(lex.pos, "unexpected trailing input");
  }
  return query;
}

namespace {

bool numeric_type(ColumnType type) {
  return type == ColumnType::kInt || type == ColumnType::kFloat;
}

bool predicate_holds(const QueryPredicate& predicate, const std::string& cell, ColumnType type) {
  if (numeric_type(type)) {
    double lhs = 0, rhs = 0;
    auto lres = std::from_chars(cell.data(), cell.data() + cell.size(), lhs);
    auto rres = std::from_chars(predicate.literal.data(),
                                predicate.literal.data() + predicate.literal.size(), rhs);
    if (lres.ec != std::errc{} || rres.ec != std::errc{}) return false;
    if (predicate.op == "=") return lhs == rhs;
    if (predicate.op == "!=") return lhs != rhs;
    if (predicate.op == "<") return lhs < rhs;
    return lhs > rhs;
  }
  if (predicate.op == "=") return cell == predicate.literal;
  if (predicate.op == "!=") return cell != predicate.literal;
  if (predicate.op == "<") return cell < predicate.literal;
  return cell > predicate.literal;
}

}  // namespace

std::vector<std::string> query_columns(const Query& query, const OutputPort& port) {
  // Every referenced column needs authorization: the select list (star
  // expands to the full schema) plus any predicate column.
  std::vector<std::string> touched;
  auto touch = [&touched](const std::string& name) {
    if (std::find(touched.begin(), touched.end(), name) == touched.end()) {
      touched.push_back(name);
    }
  };
  if (query.star) {
    for (const auto& column : port.schema) touch(column.name);
  } else {
    for (const auto& name : query.columns) touch(name);
  }
  if (query.where) touch(query.where->column);
  return touched;
}

RowSet apply_query(const Query& query, const std::vector<Column>& schema, const CsvTable& table) {
  std::vector<std::string> wanted;
  if (query.star) {
    for (const auto& column : schema) wanted.push_back(column.name);
  } else {
    wanted = query.columns;
  }

  std::vector<std::size_t> indices;
  for (const auto& name : wanted) {
    auto index = table.column_index(name);
    if (!index) {
      throw MeshError(ErrorCode::kNotFound, "column '" + name + "' not present in the dataset");
    }
    indices.push_back(*index);
  }

  std::optional<std::size_t> where_index;
  ColumnType where_type = ColumnType::kString;
  if (query.where) {
    where_index = table.column_index(query.where->column);
    if (!where_index) {
      throw MeshError(ErrorCode::kNotFound,
                      "column '" + query.where->column + "' not present in the dataset");
    }
    for (const auto& column : schema) {
      if (column.name == query.where->column) where_type = column.type;
    }
  }

  RowSet result;
  result.columns = wanted;
  for (const auto& row : table.rows) {
    if (where_index) {
      const auto& cell = *where_index < row.size() ? row[*where_index] : std::string{};
      if (!predicate_holds(*query.where, cell, where_type)) continue;
    }
    std::vector<std::string> projected;
    projected.reserve(indices.size());
    for (auto index : indices) {
      projected.push_back(index < row.size() ? row[index] : std::string{});
    }
    result.rows.push_back(std::move(projected));
  }
  return result;
}

std::variant<RowSet, Denial> gateway_query(const Subject& subject, const std::string& query_text,
                                           const MeshGraph& graph,
                                           const ClassificationStore& classifications,
                                           const std::vector<Policy>& policies,
                                           const OutputPathFn& output_path) {
  auto query = parse_query(query_text);
  const auto* port = graph.find_output_port({query.product, query.port});
  if (port == nullptr) {
    throw MeshError(ErrorCode::kNotFound,
                    "unknown output port '" + query.product + ":" + query.port + "'");
  }
  if (port->interface_type != InterfaceType::kSql) {
    throw MeshError(ErrorCode::kNotSqlPort, "port '" + query.product + ":" + query.port +
                                                "' has interface " +
                                                to_string(port->interface_type) +
                                                "; the gateway serves sql ports only");
  }
  const auto& product = *graph.find_product(query.product);
  ensure_tagged(classifications, PortRef{query.product, query.port});

  auto touched = query_columns(query, *port);
  for (const auto& name : touched) {
    bool known = std::any_of(port->schema.begin(), port->schema.end(),
                             [&](const Column& c) { return c.name == name; });
    if (!known) {
      throw MeshError(ErrorCode::kNotFound,
                      "column '" + name + "' is not part of the port schema");
    }
  }

  auto request = resolve_access_request(subject, Action::kRead, graph, classifications,
                                        query.product, query.port, touched);
  auto decision = evaluate(request, policies);
  if (decision.effect == Effect::kDeny) {
    std::string columns;
    for (const auto& c : decision.denied_columns) columns += (columns.empty() ? "" : ", ") + c;
    return Denial{"access denied for column(s): " + (columns.empty() ? "(all)" : columns),
                  std::move(decision)};
  }

  auto table = read_csv_file(output_path(product, *port));
  return apply_query(query, port->schema, table);
}

// ---------------------------------------------------------------------------
// Encryption at rest.
// ---------------------------------------------------------------------------

crypto::Bytes encrypt_dataset(const KeyRecord& key, const crypto::Bytes& plaintext) {
  return crypto::aes256gcm_encrypt(key.material, plaintext);
}

std::optional<crypto::Bytes> decrypt_dataset(const crypto::Bytes& ciphertext,
                                             const crypto::Bytes& key_material) {
  return crypto::aes256gcm_decrypt(key_material, ciphertext);
}

}  // namespace mesh
