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

// Brute-force reference implementations, deliberately independent of the
// library's code paths (own traversals, own glob matcher, no shared helpers
// beyond the data types). Tests compare the production implementations
// against these.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mesh/classification.hpp"
#include "mesh/mesh_graph.hpp"
#include "mesh/policy.hpp"

namespace mesh::test {

// Transitive closure by plain DFS over an explicit edge list.
inline std::set<std::string> closure_oracle(const MeshGraph& graph, const std::string& start,
                                            bool downstream) {
  std::vector<std::pair<std::string, std::string>> edges;  // consumer -> producer
  for (const auto& [pid, product] : graph.products()) {
    for (const auto& input : product.input_ports) {
      if (const auto* ref = std::get_if<MeshPortRef>(&input.target)) {
        if (graph.products().contains(ref->product_id)) edges.emplace_back(pid, ref->product_id);
      }
    }
  }
  std::set<std::string> seen;
  std::vector<std::string> stack{start};
  while (!stack.empty()) {
    auto current = stack.back();
    stack.pop_back();
    for (const auto& [consumer, producer] : edges) {
      const auto& next = downstream ? (producer == current ? consumer : std::string{})
                                    : (consumer == current ? producer : std::string{});
      if (!next.empty() && seen.insert(next).second) stack.push_back(next);
    }
  }
  seen.erase(start);
  return seen;
}

// Effective labels by naive recursion: an override in force wins outright,
// otherwise declared plus everything reachable upstream, externals contribute
// their manual labels.
inline std::set<std::string> effective_oracle(const MeshGraph& graph,
                                              const ClassificationStore& store,
                                              const std::string& product_id,
                                              const std::string& port_id) {
  const auto* state = store.find_state(PortRef{product_id, port_id});
  if (state != nullptr && state->active_override) {
    auto it = store.overrides.find(*state->active_override);
    if (it != store.overrides.end()) return it->second.labels;
  }
  std::set<std::string> labels;
  if (state != nullptr) labels = state->declared;
  const auto* product = graph.find_product(product_id);
  if (product == nullptr) return labels;
  for (const auto& input : product->input_ports) {
    if (const auto* ref = std::get_if<MeshPortRef>(&input.target)) {
      if (graph.find_output_port(*ref) == nullptr) continue;
      auto upstream = effective_oracle(graph, store, ref->product_id, ref->port_id);
      labels.insert(upstream.begin(), upstream.end());
    } else {
      const auto& ext = std::get<ExternalSourceRef>(input.target);
      labels.insert(ext.manual_labels.begin(), ext.manual_labels.end());
    }
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Policy decision oracle: rule enumeration with its own matching code.
// ---------------------------------------------------------------------------

inline bool oracle_glob(const std::string& pattern, const std::string& text) {
  // Recursive matcher, intentionally different from the two-pointer one.
  if (pattern.empty()) return text.empty();
  if (pattern[0] == '*') {
    for (std::size_t skip = 0; skip <= text.size(); ++skip) {
      if (oracle_glob(pattern.substr(1), text.substr(skip))) return true;
    }
    return false;
  }
  if (text.empty() || pattern[0] != text[0]) return false;
  return oracle_glob(pattern.substr(1), text.substr(1));
}

inline bool oracle_subject(const SubjectExpr& expr, const Subject& subject) {
  if (expr.any) return true;
  for (const auto& conjunction : expr.disjuncts) {
    bool all = true;
    for (const auto& term : conjunction) {
      bool v = false;
      if (term.kind == SubjectTermKind::kRole) v = subject.roles.count(term.name) > 0;
      if (term.kind == SubjectTermKind::kUser) v = subject.user == term.name;
      if (term.kind == SubjectTermKind::kDomain) {
        v = subject.domain.has_value() && *subject.domain == term.name;
      }
      if (term.kind == SubjectTermKind::kAttr) {
        auto it = subject.attrs.find(term.name);
        v = it != subject.attrs.end() && it->second;
      }
      if (term.negated) v = !v;
      if (!v) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

inline bool oracle_condition(const Condition& condition, const std::set<std::string>& labels) {
  for (const auto& conjunction : condition.disjuncts) {
    bool all = true;
    for (const auto& term : conjunction) {
      bool v = labels.count(term.label) > 0;
      if (term.negated) v = !v;
      if (!v) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

// Single-column decision: walk scopes most-specific first, enumerate matching
// rules, deny beats allow, default deny.
inline Effect oracle_decide_column(const AccessRequest& request,
                                   const std::vector<Policy>& policies,
                                   const std::string* column) {
  auto domain = request.resource.product.substr(0, request.resource.product.find('/'));
  struct ScopeSel {
    PolicyScope::Kind kind;
  };
  for (auto kind : {PolicyScope::Kind::kProduct, PolicyScope::Kind::kDomain,
                    PolicyScope::Kind::kGlobal}) {
    bool any = false;
    bool deny = false;
    for (const auto& policy : policies) {
      if (policy.scope.kind != kind) continue;
      if (kind == PolicyScope::Kind::kProduct && policy.scope.name != request.resource.product) {
        continue;
      }
      if (kind == PolicyScope::Kind::kDomain && policy.scope.name != domain) continue;
      for (const auto& rule : policy.rules) {
        if (rule.action != request.action) continue;
        if (!oracle_glob(rule.resource.product_glob, request.resource.product)) continue;
        if (rule.resource.port_glob &&
            !oracle_glob(*rule.resource.port_glob, request.resource.port)) {
          continue;
        }
        if (rule.resource.column_glob) {
          if (column == nullptr) continue;
          if (!oracle_glob(*rule.resource.column_glob, *column)) continue;
        }
        if (!oracle_subject(rule.subject, request.subject)) continue;
        if (rule.condition && !oracle_condition(*rule.condition, request.resource.labels)) {
          continue;
        }
        any = true;
        if (rule.effect == Effect::kDeny) deny = true;
      }
    }
    if (any) return deny ? Effect::kDeny : Effect::kAllow;
  }
  return Effect::kDeny;
}

inline Effect oracle_decide(const AccessRequest& request, const std::vector<Policy>& policies) {
  if (request.resource.columns.empty()) {
    return oracle_decide_column(request, policies, nullptr);
  }
  for (const auto& column : request.resource.columns) {
    if (oracle_decide_column(request, policies, &column) == Effect::kDeny) return Effect::kDeny;
  }
  return Effect::kAllow;
}

}  // namespace mesh::test
