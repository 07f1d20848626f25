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

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <unistd.h>

#include "mesh/classification.hpp"
#include "mesh/csv.hpp"
#include "mesh/descriptor.hpp"
#include "mesh/mesh_graph.hpp"
#include "mesh/service.hpp"
#include "mesh/types.hpp"

namespace mesh::test {

inline constexpr const char* kSecretHex =
    "8f1d2e3c4b5a69788796a5b4c3d2e1f00f1e2d3c4b5a69788796a5b4c3d2e1f0";

// Scratch MESH_HOME wiped on destruction.
class TempHome {
 public:
  TempHome() {
    auto base = std::filesystem::temp_directory_path();
    static std::atomic<unsigned> counter{0};
    path_ = base / ("meshplane-test-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempHome() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Fixed-epoch fake clock so event timestamps and SLO math are reproducible.
struct FakeClock {
  std::shared_ptr<std::int64_t> now = std::make_shared<std::int64_t>(1700000000);
  std::function<std::int64_t()> fn() const {
    auto ptr = now;
    return [ptr] { return *ptr; };
  }
  void advance(std::int64_t seconds) { *now += seconds; }
};

inline MeshService::Options service_options(const TempHome& home, const FakeClock& clock) {
  MeshService::Options options;
  options.home = home.path();
  options.secret_hex = kSecretHex;
  options.clock = clock.fn();
  return options;
}

// ---------------------------------------------------------------------------
// The three-product example mesh: two source-aligned products feeding one
// consumer-aligned recommendation product.
// ---------------------------------------------------------------------------

inline DataProduct tracking_product() {
  DataProduct p;
  p.id = "operations/customer-tracking";
  p.domain = "operations";
  p.archetype = Archetype::kSourceAligned;
  p.description = "Web tracking events abstracted from the clickstream source system";
  OutputPort stream;
  stream.id = "tracking-stream";
  stream.interface_type = InterfaceType::kStreaming;
  stream.address = "stores/operations/customer-tracking/stream.csv";
  stream.schema = {{"customer_id", ColumnType::kString, true},
                   {"event", ColumnType::kString, false},
                   {"occurred_at", ColumnType::kTimestamp, false}};
  stream.slos = {{SloKind::kFreshnessSeconds, 86400}};
  stream.declared_labels = {"public"};
  OutputPort blob;
  blob.id = "tracking-blob";
  blob.interface_type = InterfaceType::kBlob;
  blob.address = "stores/operations/customer-tracking/archive.bin";
  blob.declared_labels = {"public"};
  p.output_ports = {stream, blob};
  InputPort in;
  in.id = "in-clickstream";
  in.target = ExternalSourceRef{"ingest/clickstream.csv", {"public"}};
  in.style = ConsumptionStyle::kByReference;
  p.input_ports = {in};
  return p;
}

inline DataProduct details_product() {
  DataProduct p;
  p.id = "operations/customer-details";
  p.domain = "operations";
  p.archetype = Archetype::kSourceAligned;
  p.description = "Customer master data from the CRM";
  OutputPort sql;
  sql.id = "details-sql";
  sql.interface_type = InterfaceType::kSql;
  sql.address = "stores/operations/customer-details/details.csv";
  sql.schema = {{"customer_id", ColumnType::kString, true},
                {"name", ColumnType::kString, false},
                {"email", ColumnType::kString, false},
                {"country", ColumnType::kString, false}};
  sql.slos = {{SloKind::kCompletenessPct, 99}};
  sql.declared_labels = {"public"};
  p.output_ports = {sql};
  InputPort in;
  in.id = "in-crm";
  in.target = ExternalSourceRef{"ingest/crm.csv", {"public"}};
  in.style = ConsumptionStyle::kByReference;
  p.input_ports = {in};
  return p;
}

inline DataProduct recommendations_product() {
  DataProduct p;
  p.id = "marketing/customer-recommendations";
  p.domain = "marketing";
  p.archetype = Archetype::kConsumerAligned;
  p.description = "Product recommendations per customer";
  OutputPort sql;
  sql.id = "recs-sql";
  sql.interface_type = InterfaceType::kSql;
  sql.address = "stores/marketing/customer-recommendations/recs.csv";
  sql.schema = {{"customer_id", ColumnType::kString, true},
                {"recommendation", ColumnType::kString, false}};
  sql.slos = {{SloKind::kFreshnessSeconds, 86400}, {SloKind::kCompletenessPct, 99}};
  sql.declared_labels = {"public"};
  p.output_ports = {sql};
  InputPort in_tracking;
  in_tracking.id = "in-tracking";
  in_tracking.target = MeshPortRef{"operations/customer-tracking", "tracking-stream"};
  in_tracking.style = ConsumptionStyle::kByCopy;
  in_tracking.expectations = {{ExpectationKind::kColumnPresent, "customer_id", 0, 0, 0}};
  InputPort in_details;
  in_details.id = "in-details";
  in_details.target = MeshPortRef{"operations/customer-details", "details-sql"};
  in_details.style = ConsumptionStyle::kByProjection;
  in_details.projection = std::vector<std::string>{"customer_id", "country"};
  in_details.expectations = {{ExpectationKind::kNonNullFraction, "customer_id", 0.99, 0, 0}};
  p.input_ports = {in_tracking, in_details};
  return p;
}

// Minimal two-product marketing pair for governance scenarios: dp-a serves
// tracking-style data, dp-b builds on it by copy.
inline DataProduct dp_a() {
  DataProduct p;
  p.id = "marketing/dp-a";
  p.domain = "marketing";
  p.archetype = Archetype::kSourceAligned;
  p.description = "Web tracking data served to the marketing domain";
  OutputPort sql;
  sql.id = "out-sql";
  sql.interface_type = InterfaceType::kSql;
  sql.address = "stores/marketing/dp-a/out.csv";
  sql.schema = {{"customer_id", ColumnType::kString, true},
                {"page", ColumnType::kString, false}};
  sql.declared_labels = {"public"};
  OutputPort blob;
  blob.id = "out-blob";
  blob.interface_type = InterfaceType::kBlob;
  blob.address = "stores/marketing/dp-a/archive.bin";
  blob.declared_labels = {"public"};
  blob.encryption_enabled = true;
  p.output_ports = {sql, blob};
  return p;
}

inline DataProduct dp_b() {
  DataProduct p;
  p.id = "marketing/dp-b";
  p.domain = "marketing";
  p.archetype = Archetype::kConsumerAligned;
  p.description = "Aggregated view derived from dp-a";
  OutputPort sql;
  sql.id = "serve-sql";
  sql.interface_type = InterfaceType::kSql;
  sql.address = "stores/marketing/dp-b/serve.csv";
  sql.schema = {{"customer_id", ColumnType::kString, true},
                {"score", ColumnType::kFloat, false}};
  p.output_ports = {sql};
  InputPort in;
  in.id = "in-a";
  in.target = MeshPortRef{"marketing/dp-a", "out-sql"};
  in.style = ConsumptionStyle::kByCopy;
  in.expectations = {{ExpectationKind::kColumnPresent, "customer_id", 0, 0, 0}};
  p.input_ports = {in};
  return p;
}

inline MeshGraph example_mesh() {
  MeshGraph graph;
  graph.add_product(tracking_product());
  graph.add_product(details_product());
  graph.add_product(recommendations_product());
  return graph;
}

// ---------------------------------------------------------------------------
// Randomized instances.
// ---------------------------------------------------------------------------

using Rng = std::mt19937;

inline int rand_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool rand_bool(Rng& rng, double p = 0.5) {
  return std::uniform_real_distribution<double>(0, 1)(rng) < p;
}

inline std::string rand_ident(Rng& rng, const std::string& prefix) {
  return prefix + std::to_string(rand_int(rng, 0, 999999));
}

// Random DAG of products; edges only point at earlier products, so the mesh
// registers cleanly in index order.
inline std::vector<DataProduct> random_dag(Rng& rng, int n, int max_outputs = 2,
                                           double edge_prob = 0.4) {
  std::vector<DataProduct> products;
  for (int i = 0; i < n; ++i) {
    DataProduct p;
    p.domain = "dom" + std::to_string(rand_int(rng, 0, 2));
    p.id = p.domain + "/prod" + std::to_string(i);
    p.archetype = i % 2 == 0 ? Archetype::kSourceAligned : Archetype::kConsumerAligned;
    int outputs = rand_int(rng, 1, max_outputs);
    for (int o = 0; o < outputs; ++o) {
      OutputPort port;
      port.id = "out" + std::to_string(o);
      port.interface_type = InterfaceType::kSql;
      port.address = "stores/" + p.id + "/" + port.id + ".csv";
      port.schema = {{"customer_id", ColumnType::kString, true},
                     {"value", ColumnType::kInt, false}};
      p.output_ports.push_back(std::move(port));
    }
    for (int j = 0; j < i; ++j) {
      if (!rand_bool(rng, edge_prob)) continue;
      InputPort in;
      in.id = "in" + std::to_string(j);
      const auto& target = products[static_cast<std::size_t>(j)];
      in.target = MeshPortRef{
          target.id,
          target.output_ports[static_cast<std::size_t>(
                                  rand_int(rng, 0, static_cast<int>(target.output_ports.size()) - 1))]
              .id};
      in.style = ConsumptionStyle::kByReference;
      p.input_ports.push_back(std::move(in));
    }
    products.push_back(std::move(p));
  }
  return products;
}

}  // namespace mesh::test
