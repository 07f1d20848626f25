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

#include <doctest.h>

#include "mesh/errors.hpp"
#include "mesh/mesh_graph.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace mesh;

TEST_CASE("the example trio registers in dependency order") {
  auto graph = test::example_mesh();
  CHECK(graph.size() == 3);
  CHECK(graph.edges().size() == 2);
  CHECK(graph.validate().empty());
}

TEST_CASE("duplicate registration is rejected") {
  auto graph = test::example_mesh();
  CHECK_THROWS_AS(graph.add_product(test::tracking_product()), MeshError);
}

TEST_CASE("a product consuming its own output is a cycle error") {
  DataProduct p = test::dp_a();
  InputPort in;
  in.id = "in-self";
  in.target = MeshPortRef{p.id, "out-sql"};
  in.style = ConsumptionStyle::kByReference;
  p.input_ports.push_back(in);

  MeshGraph graph;
  try {
    graph.add_product(p);
    FAIL("self-loop must be rejected");
  } catch (const MeshError& error) {
    CHECK(error.code() == ErrorCode::kCycle);
  }
}

TEST_CASE("dangling target references are rejected") {
  MeshGraph graph;
  DataProduct p = test::dp_b();  // targets marketing/dp-a which is absent
  try {
    graph.add_product(p);
    FAIL("dangling reference must be rejected");
  } catch (const MeshError& error) {
    CHECK(error.code() == ErrorCode::kDanglingRef);
    CHECK(std::string(error.what()).find("marketing/dp-a") != std::string::npos);
  }

  DataProduct q = test::recommendations_product();
  q.input_ports[0].target = MeshPortRef{"marketing/x", "y"};
  try {
    graph.add_product(q);
    FAIL("dangling reference must be rejected");
  } catch (const MeshError& error) {
    CHECK(error.code() == ErrorCode::kDanglingRef);
  }
}

TEST_CASE("decommission without consumers removes the product") {
  auto graph = test::example_mesh();
  auto before = graph.validate();
  auto report = graph.remove_product("marketing/customer-recommendations", false);
  CHECK(report.dangling_consumers.empty());
  CHECK(graph.size() == 2);
  CHECK(graph.validate() == before);
}

TEST_CASE("decommission with consumers requires force and names them") {
  auto graph = test::example_mesh();
  try {
    graph.remove_product("operations/customer-tracking", false);
    FAIL("must require force");
  } catch (const MeshError& error) {
    CHECK(std::string(error.what()).find("marketing/customer-recommendations") !=
          std::string::npos);
  }
  auto report = graph.remove_product("operations/customer-tracking", true);
  REQUIRE(report.dangling_consumers.size() == 1);
  CHECK(report.dangling_consumers[0] == "marketing/customer-recommendations");
  // The forced removal leaves a dangling input behind, visible to validate().
  auto findings = graph.validate();
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].product_id == "marketing/customer-recommendations");
}

TEST_CASE("decommissioning an unknown product is not-found") {
  auto graph = test::example_mesh();
  CHECK_THROWS_AS(graph.remove_product("marketing/nope", false), MeshError);
}

TEST_CASE("lineage follows mesh edges transitively") {
  auto graph = test::example_mesh();
  CHECK(graph.lineage("operations/customer-tracking", LineageDirection::kDownstream) ==
        std::set<std::string>{"marketing/customer-recommendations"});
  CHECK(graph.lineage("marketing/customer-recommendations", LineageDirection::kUpstream) ==
        std::set<std::string>{"operations/customer-tracking", "operations/customer-details"});
  // External sources sit outside the mesh boundary and never appear.
  CHECK(graph.lineage("operations/customer-tracking", LineageDirection::kUpstream).empty());
  CHECK_THROWS_AS(graph.lineage("marketing/nope", LineageDirection::kUpstream), MeshError);
}

TEST_CASE("lineage equals the brute-force closure on random DAGs") {
  test::Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    MeshGraph graph;
    for (const auto& product : test::random_dag(rng, 15)) graph.add_product(product);
    for (const auto& [pid, _] : graph.products()) {
      CHECK(graph.lineage(pid, LineageDirection::kDownstream) ==
            test::closure_oracle(graph, pid, true));
      CHECK(graph.lineage(pid, LineageDirection::kUpstream) ==
            test::closure_oracle(graph, pid, false));
    }
  }
}

TEST_CASE("downstream/upstream duality on random DAGs") {
  test::Rng rng(7);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    MeshGraph graph;
    for (const auto& product : test::random_dag(rng, test::rand_int(rng, 2, 20))) {
      graph.add_product(product);
    }
    for (const auto& [a, _] : graph.products()) {
      auto down = graph.lineage(a, LineageDirection::kDownstream);
      for (const auto& b : down) {
        CHECK(graph.lineage(b, LineageDirection::kUpstream).contains(a));
        ++checked;
      }
      auto up = graph.lineage(a, LineageDirection::kUpstream);
      for (const auto& b : up) {
        CHECK(graph.lineage(b, LineageDirection::kDownstream).contains(a));
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("validate flags every product in a cycle") {
  // A cycle cannot be registered, so build the broken mesh unchecked.
  auto a = test::dp_a();
  InputPort back;
  back.id = "in-b";
  back.target = MeshPortRef{"marketing/dp-b", "serve-sql"};
  back.style = ConsumptionStyle::kByReference;
  a.input_ports.push_back(back);

  MeshGraph graph;
  graph.insert_unchecked(a);
  graph.insert_unchecked(test::dp_b());
  auto findings = graph.validate();
  REQUIRE(findings.size() == 2);
  CHECK(findings[0].product_id == "marketing/dp-a");
  CHECK(findings[0].detail == "member of a composition cycle");
  CHECK(findings[1].product_id == "marketing/dp-b");
}

TEST_CASE("validate on an empty mesh is empty") {
  MeshGraph graph;
  CHECK(graph.validate().empty());
}

TEST_CASE("no accepted registration sequence ever yields a cycle") {
  test::Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    MeshGraph graph;
    auto products = test::random_dag(rng, 10);
    // Try registering in a shuffled order; some fail on unresolved targets,
    // the survivors must stay acyclic throughout.
    std::shuffle(products.begin(), products.end(), rng);
    for (const auto& product : products) {
      try {
        graph.add_product(product);
      } catch (const MeshError&) {
        continue;
      }
      CHECK(graph.topological_order().size() == graph.size());
    }
  }
}

TEST_CASE("accepted products always expose at least one output port") {
  auto graph = test::example_mesh();
  for (const auto& [_, product] : graph.products()) {
    CHECK(!product.output_ports.empty());
  }
  DataProduct empty;
  empty.id = "marketing/empty";
  empty.domain = "marketing";
  CHECK_THROWS_AS(graph.add_product(empty), MeshError);
}
