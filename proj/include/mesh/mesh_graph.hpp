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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mesh/types.hpp"

namespace mesh {

// Composition edge at port granularity, derived from MeshPortRef targets.
struct MeshEdge {
  std::string consumer_product;
  std::string consumer_input;
  std::string producer_product;
  std::string producer_output;

  bool operator==(const MeshEdge&) const = default;
  auto operator<=>(const MeshEdge&) const = default;
};

struct ValidationFinding {
  std::string product_id;
  std::string detail;

  bool operator==(const ValidationFinding&) const = default;
  auto operator<=>(const ValidationFinding&) const = default;
};

// Empty report = valid mesh.
using ValidationReport = std::vector<ValidationFinding>;

struct RemovalReport {
  std::string removed_id;
  // Consumers left with dangling input targets after a forced removal.
  std::vector<std::string> dangling_consumers;

  bool operator==(const RemovalReport&) const = default;
};

enum class LineageDirection { kUpstream, kDownstream };

// The mesh at product granularity: products are nodes, MeshPortRef targets
// are edges. Accepted registrations keep the graph a DAG; rejection is the
// only path, so downstream/upstream closures stay well-defined and label
// propagation has a fixpoint.
class MeshGraph {
 public:
  // Throws kDuplicate / kDanglingRef / kCycle / kInvalidDescriptor. The
  // descriptor must already pass validate_descriptor.
  void add_product(const DataProduct& product);

  // No consumers or force: removes the product and its edges. With force and
  // live consumers, those consumers are reported as dangling.
  RemovalReport remove_product(const std::string& id, bool force);

  // Transitive closure over mesh edges; external sources are not nodes and
  // never appear.
  std::set<std::string> lineage(const std::string& id, LineageDirection direction) const;

  ValidationReport validate() const;

  // Producer products this product directly consumes from (mesh targets only).
  std::set<std::string> direct_upstream(const std::string& id) const;
  std::set<std::string> direct_downstream(const std::string& id) const;

  std::vector<MeshEdge> edges() const;

  // Deterministic topological order (dependency first). Products inside a
  // cycle (possible only in unchecked graphs) are appended in id order.
  std::vector<std::string> topological_order() const;

  const DataProduct* find_product(const std::string& id) const;
  const OutputPort* find_output_port(const MeshPortRef& ref) const;
  const DataProduct& product_or_throw(const std::string& id) const;

  const std::map<std::string, DataProduct>& products() const { return products_; }
  bool empty() const { return products_.empty(); }
  std::size_t size() const { return products_.size(); }

  // Bypasses registration checks; for rebuilding known-good state and for
  // exercising validate() on broken meshes.
  void insert_unchecked(const DataProduct& product) { products_[product.id] = product; }

  bool operator==(const MeshGraph&) const = default;

 private:
  std::map<std::string, DataProduct> products_;
};

}  // namespace mesh
