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

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mesh/descriptor.hpp"
#include "mesh/errors.hpp"
#include "helpers.hpp"

using namespace mesh;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Random but always-valid descriptor for round-trip coverage.
ProductDescriptor random_descriptor(test::Rng& rng) {
  DataProduct p;
  p.domain = "dom" + std::to_string(test::rand_int(rng, 0, 9));
  p.id = p.domain + "/prod" + std::to_string(test::rand_int(rng, 0, 99999));
  p.archetype = test::rand_bool(rng) ? Archetype::kSourceAligned : Archetype::kConsumerAligned;
  if (test::rand_bool(rng)) p.description = test::rand_ident(rng, "desc ");
  int outputs = test::rand_int(rng, 1, 3);
  for (int i = 0; i < outputs; ++i) {
    OutputPort port;
    port.id = "out" + std::to_string(i);
    port.interface_type = static_cast<InterfaceType>(test::rand_int(rng, 0, 2));
    port.address = "stores/" + p.id + "/" + port.id;
    int columns = port.interface_type == InterfaceType::kSql ? test::rand_int(rng, 1, 4)
                                                             : test::rand_int(rng, 0, 3);
    for (int c = 0; c < columns; ++c) {
      port.schema.push_back({"col" + std::to_string(c),
                             static_cast<ColumnType>(test::rand_int(rng, 0, 4)),
                             c == 0 && test::rand_bool(rng)});
    }
    if (test::rand_bool(rng)) {
      port.slos.push_back({SloKind::kFreshnessSeconds, double(test::rand_int(rng, 1, 100000))});
    }
    if (test::rand_bool(rng)) {
      port.slos.push_back({SloKind::kCompletenessPct, double(test::rand_int(rng, 1, 100))});
    }
    if (test::rand_bool(rng)) port.declared_labels.insert("public");
    port.encryption_enabled = test::rand_bool(rng, 0.2);
    p.output_ports.push_back(std::move(port));
  }
  int inputs = test::rand_int(rng, 0, 3);
  for (int i = 0; i < inputs; ++i) {
    InputPort in;
    in.id = "in" + std::to_string(i);
    if (test::rand_bool(rng)) {
      in.target = MeshPortRef{"dom0/other" + std::to_string(i), "out0"};
    } else {
      ExternalSourceRef ext;
      ext.uri = "ingest/" + test::rand_ident(rng, "src");
      if (test::rand_bool(rng)) ext.manual_labels.insert("public");
      in.target = ext;
    }
    int style = test::rand_int(rng, 0, 2);
    in.style = static_cast<ConsumptionStyle>(style);
    if (in.style == ConsumptionStyle::kByProjection) {
      in.projection = std::vector<std::string>{"col0"};
    }
    if (test::rand_bool(rng)) {
      in.expectations.push_back({ExpectationKind::kColumnPresent, "col0", 0, 0, 0});
    }
    if (test::rand_bool(rng, 0.3)) {
      in.expectations.push_back({ExpectationKind::kNonNullFraction, "col0", 0.95, 0, 0});
    }
    if (test::rand_bool(rng, 0.2)) {
      in.expectations.push_back({ExpectationKind::kMinRowCount, "", 0, test::rand_int(rng, 0, 50), 0});
    }
    p.input_ports.push_back(std::move(in));
  }
  return p;
}

}  // namespace

TEST_CASE("recommendations fixture descriptor parses cleanly") {
  auto text = serialize_descriptor(test::recommendations_product());
  auto parsed = parse_descriptor(text);
  CHECK(parsed.id == "marketing/customer-recommendations");
  CHECK(parsed.input_ports.size() == 2);
  CHECK(parsed.output_ports.size() == 1);
  CHECK(parsed.output_ports[0].interface_type == InterfaceType::kSql);
  const auto* tracking = std::get_if<MeshPortRef>(&parsed.input_ports[0].target);
  REQUIRE(tracking != nullptr);
  CHECK(tracking->product_id == "operations/customer-tracking");
  CHECK(validate_descriptor(parsed).empty());
}

TEST_CASE("missing interface on an output port names the port") {
  json doc = descriptor_to_json(test::details_product());
  doc["output_ports"][0].erase("interface");
  CHECK_THROWS_WITH_AS(parse_descriptor(doc.dump()),
                       doctest::Contains("output port 'details-sql'"), MeshError);
}

TEST_CASE("unknown enum values are rejected") {
  json doc = descriptor_to_json(test::details_product());
  doc["output_ports"][0]["interface"] = "graphql";
  CHECK_THROWS_WITH_AS(parse_descriptor(doc.dump()), doctest::Contains("graphql"), MeshError);
}

TEST_CASE("by_projection without a projection list is rejected") {
  json doc = descriptor_to_json(test::recommendations_product());
  doc["input_ports"][1].erase("projection");
  CHECK_THROWS_AS(parse_descriptor(doc.dump()), MeshError);
}

TEST_CASE("projection with a non-projection style is rejected") {
  json doc = descriptor_to_json(test::recommendations_product());
  doc["input_ports"][0]["projection"] = {"customer_id"};
  CHECK_THROWS_AS(parse_descriptor(doc.dump()), MeshError);
}

TEST_CASE("unknown keys are rejected in strict mode") {
  json doc = descriptor_to_json(test::details_product());
  doc["output_ports"][0]["slo"] = 1;  // typo for slos
  CHECK_THROWS_WITH_AS(parse_descriptor(doc.dump()), doctest::Contains("unknown key 'slo'"),
                       MeshError);
  json doc2 = descriptor_to_json(test::details_product());
  doc2["input_ports"][0]["slos"] = json::array();  // slos are output-port-only
  CHECK_THROWS_AS(parse_descriptor(doc2.dump()), MeshError);
}

TEST_CASE("malformed JSON reports a parse error") {
  CHECK_THROWS_AS(parse_descriptor("{ not json"), MeshError);
}

TEST_CASE("serialization is canonical and key-order independent") {
  auto fixture = test::recommendations_product();
  auto canonical = serialize_descriptor(fixture);
  CHECK(parse_descriptor(canonical) == fixture);
  CHECK(serialize_descriptor(parse_descriptor(canonical)) == canonical);

  // Same document with keys shuffled serializes byte-identically.
  json doc = json::parse(canonical);
  json shuffled = json::object();
  std::vector<std::string> keys;
  for (const auto& [key, _] : doc.items()) keys.push_back(key);
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) shuffled[*it] = doc[*it];
  CHECK(serialize_descriptor(parse_descriptor(shuffled.dump())) == canonical);
}

TEST_CASE("golden files for the example trio") {
  const std::string dir = FIXTURE_DIR;
  CHECK(serialize_descriptor(test::tracking_product()) ==
        read_file(dir + "/customer-tracking.dp.json"));
  CHECK(serialize_descriptor(test::details_product()) ==
        read_file(dir + "/customer-details.dp.json"));
  CHECK(serialize_descriptor(test::recommendations_product()) ==
        read_file(dir + "/customer-recommendations.dp.json"));
  // And the goldens parse back to the fixtures.
  CHECK(parse_descriptor(read_file(dir + "/customer-recommendations.dp.json")) ==
        test::recommendations_product());
}

TEST_CASE("local validation catches structural problems") {
  auto p = test::details_product();
  SUBCASE("valid fixture has no errors") { CHECK(validate_descriptor(p).empty()); }
  SUBCASE("zero output ports") {
    p.output_ports.clear();
    auto errors = validate_descriptor(p);
    REQUIRE(!errors.empty());
    CHECK(errors.front() == "product must declare at least one output port");
  }
  SUBCASE("slo threshold of zero") {
    p.output_ports[0].slos = {{SloKind::kFreshnessSeconds, 0}};
    CHECK(!validate_descriptor(p).empty());
  }
  SUBCASE("pct slo above 100") {
    p.output_ports[0].slos = {{SloKind::kCompletenessPct, 101}};
    CHECK(!validate_descriptor(p).empty());
  }
  SUBCASE("sql port without schema") {
    p.output_ports[0].schema.clear();
    CHECK(!validate_descriptor(p).empty());
  }
  SUBCASE("empty address") {
    p.output_ports[0].address.clear();
    CHECK(!validate_descriptor(p).empty());
  }
  SUBCASE("duplicate port ids") {
    p.output_ports.push_back(p.output_ports[0]);
    CHECK(!validate_descriptor(p).empty());
  }
}

TEST_CASE("round trip identity on 500 random descriptors") {
  test::Rng rng(20260810);
  for (int i = 0; i < 500; ++i) {
    auto descriptor = random_descriptor(rng);
    auto text = serialize_descriptor(descriptor);
    auto reparsed = parse_descriptor(text);
    REQUIRE(reparsed == descriptor);
    REQUIRE(serialize_descriptor(reparsed) == text);
  }
}

TEST_CASE("deleting any required key from a valid document yields an error") {
  auto fixture = test::recommendations_product();
  json doc = json::parse(serialize_descriptor(fixture));

  auto expect_invalid = [](const json& mutated) {
    bool rejected = false;
    try {
      auto parsed = parse_descriptor(mutated.dump());
      rejected = !validate_descriptor(parsed).empty();
    } catch (const MeshError&) {
      rejected = true;  // structural rejection also counts
    }
    CHECK_MESSAGE(rejected, "mutated document should not validate: ", mutated.dump());
  };

  for (const char* key : {"name", "domain", "archetype", "output_ports", "input_ports"}) {
    json mutated = doc;
    mutated.erase(key);
    expect_invalid(mutated);
  }
  for (const char* key : {"id", "interface", "address"}) {
    json mutated = doc;
    mutated["output_ports"][0].erase(key);
    expect_invalid(mutated);
  }
  for (const char* key : {"id", "target", "style"}) {
    json mutated = doc;
    mutated["input_ports"][0].erase(key);
    expect_invalid(mutated);
  }
}
