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

#include <algorithm>

#include "mesh/policy.hpp"

namespace mesh {

bool glob_match(const std::string& pattern, const std::string& text) {
  std::size_t p = 0, t = 0;
  std::size_t star = std::string::npos, backtrack = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      backtrack = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++backtrack;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

namespace {

std::string domain_of(const std::string& product_id) {
  auto pos = product_id.find('/');
  return pos == std::string::npos ? product_id : product_id.substr(0, pos);
}

bool term_holds(const SubjectTerm& term, const Subject& subject) {
  bool value = false;
  switch (term.kind) {
    case SubjectTermKind::kRole: value = subject.roles.contains(term.name); break;
    case SubjectTermKind::kUser: value = subject.user == term.name; break;
    case SubjectTermKind::kDomain: value = subject.domain && *subject.domain == term.name; break;
    case SubjectTermKind::kAttr: {
      auto it = subject.attrs.find(term.name);
      value = it != subject.attrs.end() && it->second;
      break;
    }
  }
  return term.negated ? !value : value;
}

bool subject_matches(const SubjectExpr& expr, const Subject& subject) {
  if (expr.any) return true;
  return std::any_of(expr.disjuncts.begin(), expr.disjuncts.end(), [&](const auto& conjunction) {
    return std::all_of(conjunction.begin(), conjunction.end(),
                       [&](const SubjectTerm& term) { return term_holds(term, subject); });
  });
}

bool condition_holds(const Condition& condition, const std::set<std::string>& labels) {
  return std::any_of(
      condition.disjuncts.begin(), condition.disjuncts.end(), [&](const auto& conjunction) {
        return std::all_of(conjunction.begin(), conjunction.end(), [&](const LabelTerm& term) {
          bool value = labels.contains(term.label);
          return term.negated ? !value : value;
        });
      });
}

// Why a rule did not match, for explain(); empty when it matched.
std::string mismatch_reason(const Rule& rule, const AccessRequest& request,
                            const std::optional<std::string>& column) {
  if (rule.action != request.action) {
    return std::string("action is ") + to_string(request.action) + ", rule wants " +
           to_string(rule.action);
  }
  if (!glob_match(rule.resource.product_glob, request.resource.product)) {
    return "product '" + request.resource.product + "' does not match '" +
           rule.resource.product_glob + "'";
  }
  if (rule.resource.port_glob && !glob_match(*rule.resource.port_glob, request.resource.port)) {
    return "port '" + request.resource.port + "' does not match '" + *rule.resource.port_glob + "'";
  }
  if (rule.resource.column_glob) {
    if (!column) return "rule is column-scoped but the request names no column";
    if (!glob_match(*rule.resource.column_glob, *column)) {
      return "column '" + *column + "' does not match '" + *rule.resource.column_glob + "'";
    }
  }
  if (!subject_matches(rule.subject, request.subject)) {
    return "subject does not satisfy the matcher";
  }
  if (rule.condition && !condition_holds(*rule.condition, request.resource.labels)) {
    return "label condition not satisfied by effective labels";
  }
  return "";
}

bool rule_matches(const Rule& rule, const AccessRequest& request,
                  const std::optional<std::string>& column) {
  if (rule.action != request.action) return false;
  if (!glob_match(rule.resource.product_glob, request.resource.product)) return false;
  if (rule.resource.port_glob && !glob_match(*rule.resource.port_glob, request.resource.port)) {
    return false;
  }
  if (rule.resource.column_glob) {
    if (!column) return false;
    if (!glob_match(*rule.resource.column_glob, *column)) return false;
  }
  if (!subject_matches(rule.subject, request.subject)) return false;
  if (rule.condition && !condition_holds(*rule.condition, request.resource.labels)) return false;
  return true;
}

bool scope_applies(const PolicyScope& scope, PolicyScope::Kind kind,
                   const AccessRequest& request) {
  if (scope.kind != kind) return false;
  switch (kind) {
    case PolicyScope::Kind::kGlobal: return true;
    case PolicyScope::Kind::kDomain: return scope.name == domain_of(request.resource.product);
    case PolicyScope::Kind::kProduct: return scope.name == request.resource.product;
  }
  return false;
}

const char* scope_kind_name(PolicyScope::Kind kind) {
  switch (kind) {
    case PolicyScope::Kind::kGlobal: return "global";
    case PolicyScope::Kind::kDomain: return "domain";
    case PolicyScope::Kind::kProduct: return "product";
  }
  return "";
}

// Decision for a single column slot (or the whole port when column is empty).
// The first scope holding a match decides; broader scopes are still traced so
// a shadowed rule (e.g. a global default deny under a domain allow) remains
// visible in the explanation.
Decision evaluate_slot(const AccessRequest& request, const std::vector<Policy>& policies,
                       const std::optional<std::string>& column, bool verbose) {
  static constexpr PolicyScope::Kind kOrder[] = {
      PolicyScope::Kind::kProduct, PolicyScope::Kind::kDomain, PolicyScope::Kind::kGlobal};

  Decision decision;
  bool decided = false;
  for (auto kind : kOrder) {
    bool any_match = false;
    std::optional<MatchedRule> first_match;
    std::optional<MatchedRule> first_deny;
    for (const auto& policy : policies) {
      if (!scope_applies(policy.scope, kind, request)) continue;
      for (std::size_t i = 0; i < policy.rules.size(); ++i) {
        const auto& rule = policy.rules[i];
        bool matched = rule_matches(rule, request, column);
        TraceEntry entry;
        entry.policy = policy.name;
        entry.rule_index = i;
        entry.rule = serialize_rule(rule);
        entry.column = column;
        entry.matched = matched;
        if (matched) {
          entry.note = std::string("matches; effect ") + to_string(rule.effect);
          if (decided) {
            entry.note += std::string("; shadowed by ") +
                          scope_kind_name(*decision.scope_consulted) + "-scope decision";
          }
        } else if (verbose) {
          entry.note = mismatch_reason(rule, request, column);
        }
        decision.trace.push_back(std::move(entry));
        if (!matched || decided) continue;
        any_match = true;
        if (!first_match) first_match = MatchedRule{policy.name, i};
        if (rule.effect == Effect::kDeny && !first_deny) first_deny = MatchedRule{policy.name, i};
      }
    }
    if (any_match && !decided) {
      // Deny wins over allow inside the deciding scope; the decision is final
      // but tracing continues through the remaining scopes.
      decided = true;
      decision.scope_consulted = kind;
      if (first_deny) {
        decision.effect = Effect::kDeny;
        decision.matched_rule = first_deny;
      } else {
        decision.effect = Effect::kAllow;
        decision.matched_rule = first_match;
      }
    }
  }
  if (!decided) decision.effect = Effect::kDeny;  // global default
  return decision;
}

Decision evaluate_impl(const AccessRequest& request, const std::vector<Policy>& policies,
                       bool verbose) {
  if (request.resource.columns.empty()) {
    return evaluate_slot(request, policies, std::nullopt, verbose);
  }
  Decision aggregate;
  aggregate.effect = Effect::kAllow;
  bool first_column = true;
  for (const auto& column : request.resource.columns) {
    Decision slot = evaluate_slot(request, policies, column, verbose);
    aggregate.trace.insert(aggregate.trace.end(), slot.trace.begin(), slot.trace.end());
    if (slot.effect == Effect::kDeny) {
      aggregate.denied_columns.push_back(column);
      if (aggregate.effect == Effect::kAllow) {
        // First denied column determines the reported rule and scope.
        aggregate.effect = Effect::kDeny;
        aggregate.matched_rule = slot.matched_rule;
        aggregate.scope_consulted = slot.scope_consulted;
      }
    } else if (first_column && aggregate.effect == Effect::kAllow) {
      aggregate.matched_rule = slot.matched_rule;
      aggregate.scope_consulted = slot.scope_consulted;
    }
    first_column = false;
  }
  return aggregate;
}

}  // namespace

Decision evaluate(const AccessRequest& request, const std::vector<Policy>& policies) {
  return evaluate_impl(request, policies, false);
}

Decision explain(const AccessRequest& request, const std::vector<Policy>& policies) {
  return evaluate_impl(request, policies, true);
}

}  // namespace mesh
