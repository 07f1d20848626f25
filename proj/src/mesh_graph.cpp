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

#include "mesh/mesh_graph.hpp"

#include <algorithm>
#include <deque>

#include "mesh/descriptor.hpp"
#include "mesh/errors.hpp"

namespace mesh {

namespace {

// Direct mesh dependencies of a product, ignoring unresolvable targets.
std::set<std::string> target_products(const DataProduct& product) {
  std::set<std::string> out;
  for (const auto& input : product.input_ports) {
    if (const auto* ref = std::get_if<MeshPortRef>(&input.target)) {
      out.insert(ref->product_id);
    }
  }
  return out;
}

}  // namespace

void MeshGraph::add_product(const DataProduct& product) {
  if (products_.contains(product.id)) {
    throw MeshError(ErrorCode::kDuplicate, "product '" + product.id + "' is already registered");
  }
  auto local_errors = validate_descriptor(product);
  if (!local_errors.empty()) {
    throw MeshError(ErrorCode::kInvalidDescriptor,
                    "product '" + product.id + "': " + local_errors.front());
  }
  for (const auto& input : product.input_ports) {
    if (const auto* ref = std::get_if<MeshPortRef>(&input.target)) {
      if (ref->product_id == product.id) {
        throw MeshError(ErrorCode::kCycle,
                        "product '" + product.id + "' must not consume its own output");
      }
      if (find_output_port(*ref) == nullptr) {
        throw MeshError(ErrorCode::kDanglingRef,
                        "input port '" + input.id + "' targets unknown output port '" +
                            ref->product_id + ":" + ref->port_id + "'");
      }
    }
  }
  // Registration in dependency order means a new product can only point at
  // existing ones, so a cycle would have to pass through an edge into the new
  // product, which cannot exist yet. Checked anyway to keep the invariant
  // local to this function.
  products_[product.id] = product;
  auto order = topological_order();
  if (order.size() != products_.size()) {
    products_.erase(product.id);
    throw MeshError(ErrorCode::kCycle,
                    "registering '" + product.id + "' would create a composition cycle");
  }
}

RemovalReport MeshGraph::remove_product(const std::string& id, bool force) {
  product_or_throw(id);
  auto consumers = direct_downstream(id);
  if (!consumers.empty() && !force) {
    std::string names;
    for (const auto& c : consumers) names += (names.empty() ? "" : ", ") + c;
    throw MeshError(ErrorCode::kInvalidArgument,
                    "product '" + id + "' has downstream consumers (" + names +
                        "); pass force to remove anyway");
  }
  RemovalReport report;
  report.removed_id = id;
  report.dangling_consumers.assign(consumers.begin(), consumers.end());
  products_.erase(id);
  return report;
}

std::set<std::string> MeshGraph::lineage(const std::string& id, LineageDirection direction) const {
  product_or_throw(id);
  std::set<std::string> visited;
  std::deque<std::string> frontier{id};
  while (!frontier.empty()) {
    auto current = frontier.front();
    frontier.pop_front();
    auto next = direction == LineageDirection::kUpstream ? direct_upstream(current)
                                                         : direct_downstream(current);
    for (const auto& n : next) {
      if (visited.insert(n).second) frontier.push_back(n);
    }
  }
  visited.erase(id);
  return visited;
}

std::set<std::string> MeshGraph::direct_upstream(const std::string& id) const {
  const auto* product = find_product(id);
  if (product == nullptr) return {};
  std::set<std::string> out;
  for (const auto& target : target_products(*product)) {
    if (products_.contains(target)) out.insert(target);
  }
  return out;
}

std::set<std::string> MeshGraph::direct_downstream(const std::string& id) const {
  std::set<std::string> out;
  for (const auto& [pid, product] : products_) {
    if (pid != id && target_products(product).contains(id)) out.insert(pid);
  }
  return out;
}

std::vector<MeshEdge> MeshGraph::edges() const {
  std::vector<MeshEdge> out;
  for (const auto& [pid, product] : products_) {
    for (const auto& input : product.input_ports) {
      if (const auto* ref = std::get_if<MeshPortRef>(&input.target)) {
        if (find_output_port(*ref) != nullptr) {
          out.push_back({pid, input.id, ref->product_id, ref->port_id});
        }
      }
    }
  }
  return out;
}

std::vector<std::string> MeshGraph::topological_order() const {
  // Kahn's algorithm; the ready set is kept sorted so the order is a pure
  // function of the graph, independent of insertion history.
  std::map<std::string, std::set<std::string>> pending;  // product -> unmet deps
  std::map<std::string, std::set<std::string>> dependents;
  std::set<std::string> ready;
  for (const auto& [pid, product] : products_) {
    std::set<std::string> deps;
    for (const auto& target : target_products(product)) {
      // A self-target keeps the node permanently pending, marking it cyclic.
      if (products_.contains(target)) deps.insert(target);
    }
    for (const auto& dep : deps) dependents[dep].insert(pid);
    if (deps.empty()) {
      ready.insert(pid);
    } else {
      pending[pid] = std::move(deps);
    }
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto pid = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(pid);
    for (const auto& dependent : dependents[pid]) {
      auto it = pending.find(dependent);
      if (it == pending.end()) continue;
      it->second.erase(pid);
      if (it->second.empty()) {
        pending.erase(it);
        ready.insert(dependent);
      }
    }
  }
  return order;
}

ValidationReport MeshGraph::validate() const {
  ValidationReport report;
  auto order = topological_order();
  std::set<std::string> acyclic(order.begin(), order.end());
  for (const auto& [pid, product] : products_) {
    if (!acyclic.contains(pid)) {
      report.push_back({pid, "member of a composition cycle"});
    }
    for (const auto& error : validate_descriptor(product)) {
      report.push_back({pid, error});
    }
    for (const auto& input : product.input_ports) {
      if (const auto* ref = std::get_if<MeshPortRef>(&input.target)) {
        if (ref->product_id != pid && find_output_port(*ref) == nullptr) {
          report.push_back({pid, "input port '" + input.id + "' targets unknown output port '" +
                                     ref->product_id + ":" + ref->port_id + "'"});
        }
      }
    }
  }
  std::sort(report.begin(), report.end());
  return report;
}

const DataProduct* MeshGraph::find_product(const std::string& id) const {
  auto it = products_.find(id);
  return it == products_.end() ? nullptr : &it->second;
}

const OutputPort* MeshGraph::find_output_port(const MeshPortRef& ref) const {
  const auto* product = find_product(ref.product_id);
  if (product == nullptr) return nullptr;
  for (const auto& port : product->output_ports) {
    if (port.id == ref.port_id) return &port;
  }
  return nullptr;
}

const DataProduct& MeshGraph::product_or_throw(const std::string& id) const {
  const auto* product = find_product(id);
  if (product == nullptr) {
    throw MeshError(ErrorCode::kNotFound, "unknown product '" + id + "'");
  }
  return *product;
}

}  // namespace mesh
