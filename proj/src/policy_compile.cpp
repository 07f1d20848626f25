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

#include <nlohmann/json.hpp>

#include "mesh/errors.hpp"
#include "mesh/policy.hpp"

namespace mesh {

namespace {

[[noreturn]] void unsupported(const Rule& rule, const std::string& why) {
  throw MeshError(ErrorCode::kUnsupportedConstruct,
                  "rule '" + serialize_rule(rule) + "' cannot compile to a blob-store policy: " + why);
}

// Native principals are a flat disjunction of roles and users; anything that
// needs conjunction, negation or non-identity matchers has no native shape.
std::vector<std::string> principals_for(const Rule& rule) {
  if (rule.subject.any) return {"*"};
  std::vector<std::string> principals;
  for (const auto& conjunction : rule.subject.disjuncts) {
    if (conjunction.size() != 1) {
      unsupported(rule, "subject conjunctions are not expressible as storage principals");
    }
    const auto& term = conjunction.front();
    if (term.negated) unsupported(rule, "negated subject matchers are not expressible");
    switch (term.kind) {
      case SubjectTermKind::kRole:
        principals.push_back("role:" + term.name);
        break;
      case SubjectTermKind::kUser:
        principals.push_back("user:" + term.name);
        break;
      default:
        unsupported(rule, "only role() and user() matchers map to storage principals");
    }
  }
  return principals;
}

}  // namespace

std::vector<NativeStatement> compile_native(const Policy& policy, const MeshGraph& graph,
                                            NativeTarget target) {
  (void)target;  // single target today
  std::vector<NativeStatement> statements;
  for (const auto& rule : policy.rules) {
    if (rule.condition) {
      unsupported(rule, "label conditions are evaluated against catalog metadata the store "
                        "cannot see");
    }
    if (rule.action == Action::kManage) {
      unsupported(rule, "manage is a control-plane action");
    }
    if (rule.resource.column_glob && *rule.resource.column_glob != "*") {
      unsupported(rule, "blob stores have no column granularity");
    }
    auto principals = principals_for(rule);

    for (const auto& [product_id, product] : graph.products()) {
      if (!glob_match(rule.resource.product_glob, product_id)) continue;
      for (const auto& port : product.output_ports) {
        if (rule.resource.port_glob && !glob_match(*rule.resource.port_glob, port.id)) continue;
        if (port.interface_type != InterfaceType::kBlob) {
          unsupported(rule, "port '" + product_id + ":" + port.id + "' is " +
                                to_string(port.interface_type) + ", not blob");
        }
        statements.push_back({rule.effect, principals, rule.action, port.address});
      }
    }
  }
  return statements;
}

nlohmann::json native_statements_to_json(const std::vector<NativeStatement>& statements) {
  nlohmann::json doc;
  doc["target"] = "blob_store";
  doc["statements"] = nlohmann::json::array();
  for (const auto& statement : statements) {
    doc["statements"].push_back({
        {"effect", statement.effect == Effect::kAllow ? "Allow" : "Deny"},
        {"principals", statement.principals},
        {"action", to_string(statement.action)},
        {"address_prefix", statement.address_prefix},
    });
  }
  return doc;
}

Effect native_evaluate(const std::vector<NativeStatement>& statements, const Subject& subject,
                       Action action, const std::string& address) {
  auto principal_matches = [&subject](const std::string& principal) {
    if (principal == "*") return true;
    if (principal.starts_with("role:")) return subject.roles.contains(principal.substr(5));
    if (principal.starts_with("user:")) return subject.user == principal.substr(5);
    return false;
  };
  bool allowed = false;
  for (const auto& statement : statements) {
    if (statement.action != action) continue;
    if (!address.starts_with(statement.address_prefix)) continue;
    bool principal_hit = std::any_of(statement.principals.begin(), statement.principals.end(),
                                     principal_matches);
    if (!principal_hit) continue;
    if (statement.effect == Effect::kDeny) return Effect::kDeny;  // deny overrides
    allowed = true;
  }
  return allowed ? Effect::kAllow : Effect::kDeny;
}

}  // namespace mesh
