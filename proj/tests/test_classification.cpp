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

#include "mesh/classification.hpp"
#include "mesh/csv.hpp"
#include "mesh/errors.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace mesh;

namespace {

// The governance levels used throughout: insider-restricted financial data,
// encrypted-at-rest sensitive data, and PII with subject traceability.
ClassificationStore store_with_levels() {
  ClassificationStore store;
  store.define_label("financial", {Obligation::kInsiderAccessOnly},
                     "restricted to persons on the insider list");
  store.define_label("highly-sensitive", {Obligation::kEncryptAtRest},
                     "must always be stored encrypted");
  store.define_label("sensitive-pii",
                     {Obligation::kEncryptAtRest, Obligation::kSubjectTraceability},
                     "encrypted and traceable back to the data subject");
  return store;
}

MeshGraph ab_mesh() {
  MeshGraph graph;
  graph.add_product(test::dp_a());
  graph.add_product(test::dp_b());
  return graph;
}

}  // namespace

TEST_CASE("defining sensitivity levels") {
  auto store = store_with_levels();
  CHECK(store.labels.at("financial").obligations ==
        std::set<Obligation>{Obligation::kInsiderAccessOnly});
  CHECK(store.labels.at("highly-sensitive").obligations ==
        std::set<Obligation>{Obligation::kEncryptAtRest});
  CHECK(store.labels.at("sensitive-pii").obligations ==
        std::set<Obligation>{Obligation::kEncryptAtRest, Obligation::kSubjectTraceability});
  CHECK(store.labels.contains("public"));  // built-in
  CHECK_THROWS_AS(store.define_label("financial", {}, ""), MeshError);
}

TEST_CASE("tagging replaces the declared set") {
  auto graph = ab_mesh();
  auto store = store_with_levels();
  PortRef ref{"marketing/dp-a", "out-sql"};

  tag_port(store, graph, ref, {"sensitive-pii"});
  propagate(graph, store);
  CHECK(store.find_state(ref)->declared == std::set<std::string>{"sensitive-pii"});
  CHECK(store.effective(ref) == std::set<std::string>{"sensitive-pii"});

  SUBCASE("empty tag set leaves the port untagged when nothing is inherited") {
    tag_port(store, graph, ref, {});
    propagate(graph, store);
    CHECK(store.find_state(ref)->declared.empty());
    CHECK(store.untagged(ref));
  }
  SUBCASE("unregistered labels are rejected") {
    CHECK_THROWS_AS(tag_port(store, graph, ref, {"secret"}), MeshError);
  }
  SUBCASE("unknown ports are rejected") {
    CHECK_THROWS_AS(tag_port(store, graph, PortRef{"marketing/dp-a", "nope"}, {}), MeshError);
  }
}

TEST_CASE("tags propagate transitively to every downstream output port") {
  auto graph = ab_mesh();
  auto store = store_with_levels();
  tag_port(store, graph, PortRef{"marketing/dp-a", "out-sql"}, {"sensitive-pii"});
  auto effective = propagate(graph, store);
  // dp-b consumes dp-a's sql port; all of dp-b's outputs carry the label.
  CHECK(effective.at("marketing/dp-b:serve-sql").contains("sensitive-pii"));
  // dp-a's blob port does not inherit from its sibling.
  CHECK(!effective.at("marketing/dp-a:out-blob").contains("sensitive-pii"));
}

TEST_CASE("propagation on an empty mesh is empty") {
  MeshGraph graph;
  ClassificationStore store;
  CHECK(propagate(graph, store).empty());
}

TEST_CASE("propagation equals the brute-force oracle on random DAGs") {
  test::Rng rng(20251);
  std::vector<std::string> label_pool{"financial", "highly-sensitive", "sensitive-pii", "public"};
  for (int trial = 0; trial < 200; ++trial) {
    MeshGraph graph;
    auto store = store_with_levels();
    for (const auto& product : test::random_dag(rng, test::rand_int(rng, 1, 20))) {
      graph.add_product(product);
    }
    // Random declared sets.
    for (const auto& [pid, product] : graph.products()) {
      for (const auto& port : product.output_ports) {
        std::set<std::string> declared;
        for (const auto& label : label_pool) {
          if (test::rand_bool(rng, 0.2)) declared.insert(label);
        }
        tag_port(store, graph, PortRef{pid, port.id}, declared);
      }
    }
    // Some random overrides, approved or pending.
    for (const auto& [pid, product] : graph.products()) {
      if (!test::rand_bool(rng, 0.25)) continue;
      const auto& port = product.output_ports.front();
      std::set<std::string> labels;
      if (test::rand_bool(rng)) labels.insert("financial");
      auto& request = request_override(store, graph, test::rand_ident(rng, "ovr"),
                                       PortRef{pid, port.id}, labels, "test", "tester", 1);
      if (request.status == OverrideStatus::kPending && test::rand_bool(rng)) {
        review_override(store, request.id, ReviewVerdict::kApprove, "governance", 2);
      }
    }
    auto effective = propagate(graph, store);
    for (const auto& [pid, product] : graph.products()) {
      for (const auto& port : product.output_ports) {
        REQUIRE(effective.at(pid + ":" + port.id) ==
                test::effective_oracle(graph, store, pid, port.id));
      }
    }
  }
}

TEST_CASE("propagation is insensitive to structural relabeling") {
  // The same DAG built under reversed ids must produce isomorphic results;
  // together with oracle equality this pins order independence.
  test::Rng rng(5150);
  auto products = test::random_dag(rng, 12);
  auto rename = [](const std::string& id) {
    return "zz" + id;  // flips map iteration order
  };
  MeshGraph a, b;
  auto store_a = store_with_levels();
  auto store_b = store_with_levels();
  for (const auto& product : products) {
    a.add_product(product);
    auto renamed = product;
    renamed.id = rename(product.id);
    renamed.domain = "zz" + product.domain;
    for (auto& input : renamed.input_ports) {
      if (auto* ref = std::get_if<MeshPortRef>(&input.target)) {
        ref->product_id = rename(ref->product_id);
      }
    }
    b.add_product(renamed);
  }
  for (const auto& [pid, product] : a.products()) {
    tag_port(store_a, a, PortRef{pid, product.output_ports[0].id},
             {pid.ends_with("0") ? "financial" : "public"});
    tag_port(store_b, b, PortRef{rename(pid), product.output_ports[0].id},
             {pid.ends_with("0") ? "financial" : "public"});
  }
  auto effective_a = propagate(a, store_a);
  auto effective_b = propagate(b, store_b);
  for (const auto& [key, labels] : effective_a) {
    CHECK(effective_b.at("zz" + key) == labels);
  }
}

TEST_CASE("adding an upstream label never removes downstream labels") {
  test::Rng rng(314);
  for (int trial = 0; trial < 200; ++trial) {
    MeshGraph graph;
    auto store = store_with_levels();
    for (const auto& product : test::random_dag(rng, 10)) graph.add_product(product);
    std::vector<PortRef> refs;
    for (const auto& [pid, product] : graph.products()) {
      for (const auto& port : product.output_ports) {
        refs.push_back({pid, port.id});
        if (test::rand_bool(rng, 0.3)) {
          tag_port(store, graph, refs.back(), {"public"});
        }
      }
    }
    auto before = propagate(graph, store);
    // Mutate: add one label to a random port's declared set.
    auto& target = refs[static_cast<std::size_t>(test::rand_int(rng, 0, int(refs.size()) - 1))];
    auto declared = store.find_state(target) ? store.find_state(target)->declared
                                             : std::set<std::string>{};
    declared.insert("highly-sensitive");
    tag_port(store, graph, target, declared);
    auto after = propagate(graph, store);
    for (const auto& [key, labels] : before) {
      for (const auto& label : labels) {
        REQUIRE(after.at(key).contains(label));
      }
    }
  }
}

TEST_CASE("strictly additive overrides auto-approve") {
  auto graph = ab_mesh();
  auto store = store_with_levels();
  tag_port(store, graph, PortRef{"marketing/dp-a", "out-sql"}, {"sensitive-pii"});
  propagate(graph, store);

  // dp-b inherits sensitive-pii; proposing a superset skips review.
  auto& request = request_override(store, graph, "ovr-1", PortRef{"marketing/dp-b", "serve-sql"},
                                   {"sensitive-pii", "financial"}, "adds insider restriction",
                                   "dp-b-team", 100);
  CHECK(request.status == OverrideStatus::kAutoApproved);
  auto effective = propagate(graph, store);
  CHECK(effective.at("marketing/dp-b:serve-sql") ==
        std::set<std::string>{"sensitive-pii", "financial"});
}

TEST_CASE("label-removing overrides stay pending and change nothing until approved") {
  auto graph = ab_mesh();
  auto store = store_with_levels();
  tag_port(store, graph, PortRef{"marketing/dp-a", "out-sql"}, {"sensitive-pii"});
  propagate(graph, store);

  auto& request = request_override(store, graph, "ovr-1", PortRef{"marketing/dp-b", "serve-sql"},
                                   {}, "output cleansed of PII", "dp-b-team", 100);
  CHECK(request.status == OverrideStatus::kPending);
  auto effective = propagate(graph, store);
  CHECK(effective.at("marketing/dp-b:serve-sql") == std::set<std::string>{"sensitive-pii"});

  SUBCASE("approval clears the labels and shrinks downstream sets") {
    review_override(store, "ovr-1", ReviewVerdict::kApprove, "governance", 200);
    auto updated = propagate(graph, store);
    CHECK(updated.at("marketing/dp-b:serve-sql").empty());
    CHECK(!store.untagged(PortRef{"marketing/dp-b", "serve-sql"}));  // positively classified
  }
  SUBCASE("rejection leaves the inherited labels in force") {
    review_override(store, "ovr-1", ReviewVerdict::kReject, "governance", 200);
    auto updated = propagate(graph, store);
    CHECK(updated.at("marketing/dp-b:serve-sql") == std::set<std::string>{"sensitive-pii"});
  }
  SUBCASE("re-reviewing a settled request is an error") {
    review_override(store, "ovr-1", ReviewVerdict::kApprove, "governance", 200);
    CHECK_THROWS_AS(review_override(store, "ovr-1", ReviewVerdict::kApprove, "governance", 201),
                    MeshError);
  }
  SUBCASE("a second pending request on the same port is rejected") {
    CHECK_THROWS_AS(request_override(store, graph, "ovr-2", PortRef{"marketing/dp-b", "serve-sql"},
                                     {"public"}, "", "dp-b-team", 101),
                    MeshError);
  }
}

TEST_CASE("combining non-sensitive data can be escalated without review") {
  auto graph = ab_mesh();
  auto store = store_with_levels();
  // Nothing inherited, nothing declared: any proposal is a superset.
  auto& request = request_override(store, graph, "ovr-1", PortRef{"marketing/dp-b", "serve-sql"},
                                   {"financial"}, "combined sales data enables revenue forecast",
                                   "dp-b-team", 100);
  CHECK(request.status == OverrideStatus::kAutoApproved);
  CHECK(propagate(graph, store).at("marketing/dp-b:serve-sql") ==
        std::set<std::string>{"financial"});
}

TEST_CASE("every auto-approved override is a superset of declared plus inherited") {
  test::Rng rng(777);
  std::vector<std::string> pool{"financial", "highly-sensitive", "sensitive-pii", "public"};
  for (int trial = 0; trial < 200; ++trial) {
    MeshGraph graph;
    auto store = store_with_levels();
    for (const auto& product : test::random_dag(rng, 8)) graph.add_product(product);
    for (const auto& [pid, product] : graph.products()) {
      for (const auto& port : product.output_ports) {
        std::set<std::string> declared;
        for (const auto& label : pool) {
          if (test::rand_bool(rng, 0.3)) declared.insert(label);
        }
        tag_port(store, graph, PortRef{pid, port.id}, declared);
      }
    }
    propagate(graph, store);
    for (const auto& [pid, product] : graph.products()) {
      if (!test::rand_bool(rng, 0.5)) continue;
      PortRef ref{pid, product.output_ports[0].id};
      std::set<std::string> proposal;
      for (const auto& label : pool) {
        if (test::rand_bool(rng, 0.4)) proposal.insert(label);
      }
      const auto* state = store.find_state(ref);
      std::set<std::string> current = state->declared;
      current.insert(state->inherited.begin(), state->inherited.end());
      auto& request = request_override(store, graph, test::rand_ident(rng, "ovr"), ref, proposal,
                                       "", "team", 1);
      bool superset = std::includes(proposal.begin(), proposal.end(), current.begin(),
                                    current.end());
      REQUIRE((request.status == OverrideStatus::kAutoApproved) == superset);
    }
  }
}

TEST_CASE("obligation compliance reporting") {
  auto graph = ab_mesh();
  auto store = store_with_levels();

  SUBCASE("encrypt_at_rest unmet on a plaintext port") {
    tag_port(store, graph, PortRef{"marketing/dp-a", "out-sql"}, {"highly-sensitive"});
    propagate(graph, store);
    auto report = check_obligations(graph, store, PortRef{"marketing/dp-a", "out-sql"});
    CHECK(!report.compliant());
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings[0].obligation == Obligation::kEncryptAtRest);
    CHECK(!report.findings[0].met);
    CHECK(report.findings[0].detail.find("encrypt_at_rest unmet") != std::string::npos);
  }

  SUBCASE("pii port with subject column and encryption is compliant") {
    MeshGraph graph2;
    auto a = test::dp_a();
    a.output_ports[0].encryption_enabled = true;
    graph2.add_product(a);
    tag_port(store, graph2, PortRef{"marketing/dp-a", "out-sql"}, {"sensitive-pii"});
    propagate(graph2, store);
    auto report = check_obligations(graph2, store, PortRef{"marketing/dp-a", "out-sql"});
    CHECK(report.compliant());
    CHECK(report.findings.size() == 2);
  }

  SUBCASE("untagged ports are reported as such") {
    propagate(graph, store);
    auto report = check_obligations(graph, store, PortRef{"marketing/dp-b", "serve-sql"});
    CHECK(report.untagged);
    CHECK(!report.compliant());
  }

  SUBCASE("insider restriction is informational") {
    tag_port(store, graph, PortRef{"marketing/dp-a", "out-sql"}, {"financial"});
    propagate(graph, store);
    auto report = check_obligations(graph, store, PortRef{"marketing/dp-a", "out-sql"});
    CHECK(report.compliant());
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings[0].met);
  }
}

TEST_CASE("subject deletion purges provider stores and by-copy materializations") {
  test::TempHome home;
  auto graph = ab_mesh();
  auto store = store_with_levels();
  tag_port(store, graph, PortRef{"marketing/dp-a", "out-sql"}, {"sensitive-pii"});
  propagate(graph, store);

  StorePaths paths;
  paths.output_path = [&](const DataProduct&, const OutputPort& port) {
    return home.path() / port.address;
  };
  paths.copy_path = [&](const DataProduct& product, const InputPort& input) {
    return home.path() / "copies" / product.domain / product.name() / (input.id + ".csv");
  };

  // dp-a's store: 3 rows for c-7; dp-b's copy: 2; dp-b's own store: 1.
  CsvTable a_table{{"customer_id", "page"},
                   {{"c-7", "/home"}, {"c-1", "/cart"}, {"c-7", "/buy"}, {"c-7", "/exit"},
                    {"c-2", "/home"}}};
  write_csv_file(home.path() / "stores/marketing/dp-a/out.csv", a_table);
  CsvTable b_copy{{"customer_id", "page"}, {{"c-7", "/home"}, {"c-2", "/home"}, {"c-7", "/buy"}}};
  write_csv_file(home.path() / "copies/marketing/dp-b/in-a.csv", b_copy);
  CsvTable b_table{{"customer_id", "score"}, {{"c-7", "0.9"}, {"c-3", "0.4"}}};
  write_csv_file(home.path() / "stores/marketing/dp-b/serve.csv", b_table);

  auto report = forget_subject(graph, store, "c-7", paths);
  REQUIRE(report.entries.size() == 3);
  std::int64_t total = 0;
  for (const auto& entry : report.entries) total += entry.rows_removed;
  CHECK(total == 6);

  // Full rescan: no store retains the subject.
  for (const auto& file : {"stores/marketing/dp-a/out.csv", "copies/marketing/dp-b/in-a.csv",
                           "stores/marketing/dp-b/serve.csv"}) {
    auto table = read_csv_file(home.path() / file);
    auto col = table.column_index("customer_id");
    REQUIRE(col.has_value());
    for (const auto& row : table.rows) CHECK(row[*col] != "c-7");
  }

  SUBCASE("absent subjects produce an empty report") {
    auto empty = forget_subject(graph, store, "c-404", paths);
    CHECK(empty.entries.empty());
  }
}

TEST_CASE("deletion refuses when a pii port lacks a subject-reference column") {
  MeshGraph graph;
  auto a = test::dp_a();
  a.output_ports[0].schema = {{"customer_id", ColumnType::kString, false},
                              {"page", ColumnType::kString, false}};
  graph.add_product(a);
  auto store = store_with_levels();
  tag_port(store, graph, PortRef{"marketing/dp-a", "out-sql"}, {"sensitive-pii"});
  propagate(graph, store);

  StorePaths paths;
  paths.output_path = [](const DataProduct&, const OutputPort& port) {
    return std::filesystem::path(port.address);
  };
  paths.copy_path = [](const DataProduct&, const InputPort&) {
    return std::filesystem::path("unused");
  };
  try {
    forget_subject(graph, store, "c-7", paths);
    FAIL("deletion must be refused");
  } catch (const MeshError& error) {
    CHECK(error.code() == ErrorCode::kObligationViolation);
  }
}
