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

#include "mesh/http_server.hpp"

#include <httplib.h>

#include "mesh/descriptor.hpp"
#include "mesh/errors.hpp"
#include "mesh/json_codec.hpp"

namespace mesh {

using nlohmann::json;

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kDuplicate: return 409;
    case ErrorCode::kUntagged: return 403;
    case ErrorCode::kIo:
    case ErrorCode::kCorruptLog: return 500;
    default: return 422;
  }
}

void reply_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void reply_error(httplib::Response& res, const MeshError& error) {
  reply_json(res, {{"error", error_code_name(error.code())}, {"message", error.what()}},
             status_for(error.code()));
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json doc = json::parse(req.body, nullptr, false);
  if (doc.is_discarded()) {
    throw MeshError(ErrorCode::kParse, "request body is not valid JSON");
  }
  return doc;
}

std::string actor_of(const httplib::Request& req, const json& body) {
  if (body.is_object() && body.contains("actor") && body["actor"].is_string()) {
    return body["actor"].get<std::string>();
  }
  auto header = req.get_header_value("X-Mesh-Actor");
  return header.empty() ? "api" : header;
}

std::set<std::string> string_set(const json& arr) {
  std::set<std::string> out;
  for (const auto& item : arr) out.insert(item.get<std::string>());
  return out;
}

Action action_of(const json& body) {
  auto action = action_from_string(body.value("action", "read"));
  if (!action) {
    throw MeshError(ErrorCode::kInvalidArgument,
                    "unknown action '" + body.value("action", "") + "'");
  }
  return *action;
}

MeshPortRef resource_of(const json& body) {
  if (!body.contains("resource") || !body["resource"].is_object()) {
    throw MeshError(ErrorCode::kInvalidArgument, "'resource' object required");
  }
  const auto& resource = body["resource"];
  return MeshPortRef{resource.value("product", ""), resource.value("port", "")};
}

template <typename Fn>
void handle(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const MeshError& error) {
    reply_error(res, error);
  } catch (const std::exception& error) {
    reply_json(res, {{"error", "internal"}, {"message", error.what()}}, 500);
  }
  (void)req;
}

}  // namespace

HttpServer::HttpServer(MeshService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port) {
  return server_->listen(host, port);
}

int HttpServer::bind_any_port(const std::string& host) {
  return server_->bind_to_any_port(host);
}

bool HttpServer::listen_after_bind() { return server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

void HttpServer::install_routes() {
  auto& svr = *server_;

  svr.Get("/products", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      json out = json::array();
      for (const auto& product : service_.list_products()) {
        json doc = descriptor_to_json(product);
        doc["id"] = product.id;
        out.push_back(std::move(doc));
      }
      reply_json(res, {{"products", out}});
    });
  });

  svr.Post("/products", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      // Surface the full validation error list, not just the first failure.
      ProductDescriptor descriptor;
      try {
        descriptor = parse_descriptor(req.body);
      } catch (const MeshError& error) {
        reply_json(res, {{"errors", json::array({error.what()})}}, 422);
        return;
      }
      auto errors = validate_descriptor(descriptor);
      if (!errors.empty()) {
        reply_json(res, {{"errors", errors}}, 422);
        return;
      }
      auto id = service_.register_product(req.body, actor_of(req, json::object()));
      reply_json(res, {{"id", id}}, 201);
    });
  });

  svr.Get(R"(/products/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto product = service_.get_product(req.matches[1]);
      json doc = descriptor_to_json(product);
      doc["id"] = product.id;
      reply_json(res, doc);
    });
  });

  svr.Delete(R"(/products/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      bool force = req.get_param_value("force") == "true";
      auto report = service_.decommission_product(req.matches[1], force, "api");
      reply_json(res, to_json(report));
    });
  });

  svr.Get(R"(/lineage/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto direction = req.get_param_value("direction") == "upstream"
                           ? LineageDirection::kUpstream
                           : LineageDirection::kDownstream;
      auto ids = service_.lineage(req.matches[1], direction);
      reply_json(res, {{"products", std::vector<std::string>(ids.begin(), ids.end())}});
    });
  });

  svr.Get("/mesh/validate", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] { reply_json(res, {{"findings", to_json(service_.validate_mesh())}}); });
  });

  svr.Get("/labels", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      json out = json::array();
      for (const auto& label : service_.list_labels()) out.push_back(to_json(label));
      reply_json(res, {{"labels", out}});
    });
  });

  svr.Post("/labels", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      std::set<Obligation> obligations;
      for (const auto& name : body.value("obligations", json::array())) {
        auto parsed = obligation_from_string(name.get<std::string>());
        if (!parsed) {
          throw MeshError(ErrorCode::kInvalidArgument,
                          "unknown obligation '" + name.get<std::string>() + "'");
        }
        obligations.insert(*parsed);
      }
      auto label = service_.define_label(body.value("name", ""), obligations,
                                         body.value("description", ""), actor_of(req, body));
      reply_json(res, to_json(label), 201);
    });
  });

  svr.Post(R"(/ports/(.+)/tags)", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      auto state = service_.tag_port(parse_port_ref(req.matches[1]),
                                     string_set(body.value("labels", json::array())),
                                     actor_of(req, body));
      auto snapshot = service_.state_copy();
      reply_json(res, to_json(state, snapshot.classifications));
    });
  });

  svr.Get(R"(/ports/(.+)/obligations)", [this](const httplib::Request& req,
                                               httplib::Response& res) {
    handle(req, res, [&] {
      reply_json(res, to_json(service_.check_obligations(parse_port_ref(req.matches[1]))));
    });
  });

  svr.Get("/overrides", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      json out = json::array();
      for (const auto& request : service_.list_overrides()) out.push_back(to_json(request));
      reply_json(res, {{"overrides", out}});
    });
  });

  svr.Post("/overrides", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      auto request = service_.request_override(parse_port_ref(body.value("port", "")),
                                               string_set(body.value("labels", json::array())),
                                               body.value("justification", ""),
                                               actor_of(req, body));
      reply_json(res, to_json(request), 201);
    });
  });

  svr.Post(R"(/overrides/([^/]+)/review)", [this](const httplib::Request& req,
                                                  httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      auto verdict = body.value("verdict", "") == "approve" ? ReviewVerdict::kApprove
                                                            : ReviewVerdict::kReject;
      if (body.value("verdict", "") != "approve" && body.value("verdict", "") != "reject") {
        throw MeshError(ErrorCode::kInvalidArgument, "verdict must be 'approve' or 'reject'");
      }
      auto request =
          service_.review_override(req.matches[1], verdict, body.value("reviewer", "governance"));
      reply_json(res, to_json(request));
    });
  });

  svr.Get("/policies", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      json out = json::array();
      for (const auto& policy : service_.list_policies()) {
        out.push_back({{"name", policy.name}, {"text", serialize_policy(policy)}});
      }
      reply_json(res, {{"policies", out}});
    });
  });

  svr.Post("/policies", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      auto text = body.is_object() && body.contains("text") ? body["text"].get<std::string>()
                                                            : req.body;
      auto name = service_.apply_policy(text, actor_of(req, body));
      reply_json(res, {{"name", name}}, 201);
    });
  });

  svr.Post("/decisions", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      auto resource = resource_of(body);
      std::vector<std::string> columns;
      if (body["resource"].contains("columns")) {
        for (const auto& c : body["resource"]["columns"]) columns.push_back(c.get<std::string>());
      }
      auto decision = service_.decide(subject_from_json(body.value("subject", json::object())),
                                      action_of(body), resource.product_id, resource.port_id,
                                      columns, body.value("explain", false));
      reply_json(res, to_json(decision));
    });
  });

  svr.Post("/access-requests", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      auto mode = MeshService::access_mode_from_string(body.value("mode", "token"));
      if (!mode) {
        throw MeshError(ErrorCode::kInvalidArgument,
                        "mode must be gateway, token or key");
      }
      auto outcome = service_.submit_access_request(
          subject_from_json(body.value("subject", json::object())), resource_of(body),
          action_of(body), *mode, actor_of(req, body));
      if (const auto* denial = std::get_if<Denial>(&outcome)) {
        reply_json(res, to_json(*denial), 403);
        return;
      }
      const auto& grant = std::get<MeshService::AccessGrant>(outcome);
      json doc;
      doc["granted"] = true;
      doc["mode"] = grant.mode;
      doc["address"] = grant.address;
      doc["decision"] = to_json(grant.decision);
      if (grant.token) {
        doc["token"] = grant.token->token.encoded;
        doc["expires_at"] = grant.token->token.payload.expires_at;
      }
      if (grant.key_id) doc["key_id"] = *grant.key_id;
      reply_json(res, doc, 201);
    });
  });

  svr.Post("/tokens/verify", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      auto resource = resource_of(body);
      std::optional<std::int64_t> now;
      if (body.contains("now")) now = body["now"].get<std::int64_t>();
      auto result = service_.verify_token(body.value("token", ""), resource.product_id,
                                          resource.port_id, now);
      reply_json(res, {{"result", to_string(result)}});
    });
  });

  svr.Post("/queries", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      auto outcome = service_.gateway_query(
          subject_from_json(body.value("subject", json::object())), body.value("sql", ""),
          actor_of(req, body));
      if (const auto* denial = std::get_if<Denial>(&outcome)) {
        reply_json(res, to_json(*denial), 403);
        return;
      }
      reply_json(res, to_json(std::get<RowSet>(outcome)));
    });
  });

  svr.Post(R"(/keys/([^/]+)/request)", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      auto outcome = service_.request_key(subject_from_json(body.value("subject", json::object())),
                                          req.matches[1], actor_of(req, body));
      if (const auto* denial = std::get_if<Denial>(&outcome)) {
        reply_json(res, to_json(*denial), 403);
        return;
      }
      reply_json(res, {{"key_hex", crypto::hex_encode(std::get<crypto::Bytes>(outcome))}});
    });
  });

  svr.Post(R"(/contracts/(.+)/run)", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto report = service_.run_contracts(parse_port_ref(req.matches[1]), "api");
      reply_json(res, to_json(report));
    });
  });

  svr.Get("/catalog/search", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] {
      auto entries = service_.search_catalog(req.get_param_value("q"),
                                             req.get_param_value("label"));
      json out = json::array();
      for (const auto& entry : entries) out.push_back(to_json(entry));
      reply_json(res, {{"results", out}});
    });
  });

  svr.Post(R"(/subjects/([^/]+)/forget)", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
    handle(req, res, [&] {
      auto body = parse_body(req);
      reply_json(res, to_json(service_.forget_subject(req.matches[1], actor_of(req, body))));
    });
  });

  svr.Get("/state/hash", [this](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&] { reply_json(res, {{"hash", service_.state_hash()}}); });
  });
}

}  // namespace mesh
