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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mesh/mesh_graph.hpp"

namespace mesh {

// ---------------------------------------------------------------------------
// Policy language AST (".mpol" files; grammar in docs/policy.md).
// ---------------------------------------------------------------------------

enum class Action { kRead, kWrite, kManage };
enum class Effect { kAllow, kDeny };

const char* to_string(Action v);
const char* to_string(Effect v);
std::optional<Action> action_from_string(const std::string& s);

// "product-glob[:port-glob[:column-glob]]". Globs are '*'-only, no regex;
// absent parts match everything.
struct ResourcePattern {
  std::string product_glob;
  std::optional<std::string> port_glob;
  std::optional<std::string> column_glob;

  bool operator==(const ResourcePattern&) const = default;
};

enum class SubjectTermKind { kRole, kUser, kDomain, kAttr };

struct SubjectTerm {
  bool negated = false;
  SubjectTermKind kind = SubjectTermKind::kRole;
  std::string name;

  bool operator==(const SubjectTerm&) const = default;
};

// Disjunction of conjunctions, the shape the grammar produces ("and" binds
// tighter than "or", "not" applies to a single term).
struct SubjectExpr {
  bool any = false;
  std::vector<std::vector<SubjectTerm>> disjuncts;

  bool operator==(const SubjectExpr&) const = default;
};

struct LabelTerm {
  bool negated = false;
  std::string label;

  bool operator==(const LabelTerm&) const = default;
};

struct Condition {
  std::vector<std::vector<LabelTerm>> disjuncts;

  bool operator==(const Condition&) const = default;
};

struct Rule {
  Effect effect = Effect::kDeny;
  Action action = Action::kRead;
  ResourcePattern resource;
  SubjectExpr subject;
  std::optional<Condition> condition;

  bool operator==(const Rule&) const = default;
};

struct PolicyScope {
  enum class Kind { kGlobal, kDomain, kProduct };
  Kind kind = Kind::kGlobal;
  std::string name;  // domain name or product id; empty for global

  bool operator==(const PolicyScope&) const = default;
};

struct Policy {
  std::string name;
  PolicyScope scope;
  std::vector<Rule> rules;

  bool operator==(const Policy&) const = default;
};

// Throws MeshError(kParse) with "line L, column C" positions, and
// MeshError(kScopeMismatch) when a rule references resources outside its
// policy's scope.
Policy parse_policy(const std::string& text);

// Canonical text form; parse(serialize(p)) == p.
std::string serialize_policy(const Policy& policy);
std::string serialize_rule(const Rule& rule);

// '*'-wildcard match, anchored on both ends.
bool glob_match(const std::string& pattern, const std::string& text);

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

struct Subject {
  std::string user;
  std::set<std::string> roles;
  std::optional<std::string> domain;
  std::map<std::string, bool> attrs;

  bool operator==(const Subject&) const = default;
};

// A request resource after resolution against the mesh: concrete product and
// port, the columns in play (a port-level request on a schema-bearing port
// resolves to the full column set), and the port's effective labels.
struct ResolvedResource {
  std::string product;
  std::string port;
  std::vector<std::string> columns;
  std::set<std::string> labels;

  bool operator==(const ResolvedResource&) const = default;
};

struct AccessRequest {
  Subject subject;
  Action action = Action::kRead;
  ResolvedResource resource;
};

struct MatchedRule {
  std::string policy;
  std::size_t rule_index = 0;

  bool operator==(const MatchedRule&) const = default;
};

struct TraceEntry {
  std::string policy;
  std::size_t rule_index = 0;
  std::string rule;
  std::optional<std::string> column;
  bool matched = false;
  std::string note;
};

struct Decision {
  Effect effect = Effect::kDeny;
  // Unset exactly when the default deny fired (no rule matched in any scope).
  std::optional<MatchedRule> matched_rule;
  std::optional<PolicyScope::Kind> scope_consulted;
  std::vector<TraceEntry> trace;
  std::vector<std::string> denied_columns;
};

// Pure function of its inputs. Scopes are consulted product -> domain ->
// global; within the first scope holding at least one matching rule, deny
// wins over allow and the decision is final; with no match anywhere the
// default is deny. Requests carrying several columns decide column-wise and
// allow only if every column allows.
Decision evaluate(const AccessRequest& request, const std::vector<Policy>& policies);

// Same decision as evaluate, with per-clause notes on non-matching rules.
Decision explain(const AccessRequest& request, const std::vector<Policy>& policies);

// ---------------------------------------------------------------------------
// Native storage-policy translation (blob target).
// ---------------------------------------------------------------------------

struct NativeStatement {
  Effect effect = Effect::kAllow;
  std::vector<std::string> principals;  // "role:<name>", "user:<name>", or "*"
  Action action = Action::kRead;
  std::string address_prefix;

  bool operator==(const NativeStatement&) const = default;
};

enum class NativeTarget { kBlobStore };

// Maps a policy onto prefix-scoped storage statements for blob ports.
// Throws MeshError(kUnsupportedConstruct), naming the rule, for anything the
// native model cannot express: label conditions, manage actions, non-blob
// resources, subject matchers beyond disjunctions of roles/users.
std::vector<NativeStatement> compile_native(const Policy& policy, const MeshGraph& graph,
                                            NativeTarget target);

nlohmann::json native_statements_to_json(const std::vector<NativeStatement>& statements);

// Reference evaluator for compiled statements (prefix + principal matching,
// deny overrides, default deny); used to replay requests against the
// compiled form.
Effect native_evaluate(const std::vector<NativeStatement>& statements, const Subject& subject,
                       Action action, const std::string& address);

}  // namespace mesh
