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

#include "mesh/descriptor.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mesh/errors.hpp"

namespace mesh {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw MeshError(ErrorCode::kInvalidDescriptor, message);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) {
      fail(where + ": unknown key '" + key + "'");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(where + ": missing required key '" + std::string(key) + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) fail(where + ": '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::set<std::string> string_set(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + " must be an array of strings");
  std::set<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) fail(where + " must contain only strings");
    out.insert(item.get<std::string>());
  }
  return out;
}

Column parse_column(const json& obj, const std::string& where) {
  if (!obj.is_object()) fail(where + ": schema entries must be objects");
  reject_unknown_keys(obj, {"name", "type", "subject_ref"}, where);
  Column col;
  col.name = require_string(obj, "name", where);
  auto type_name = require_string(obj, "type", where);
  auto type = column_type_from_string(type_name);
  if (!type) fail(where + ": unknown column type '" + type_name + "'");
  col.type = *type;
  if (obj.contains("subject_ref")) {
    if (!obj["subject_ref"].is_boolean()) fail(where + ": 'subject_ref' must be a boolean");
    col.subject_ref = obj["subject_ref"].get<bool>();
  }
  return col;
}

Slo parse_slo(const json& obj, const std::string& where) {
  if (!obj.is_object()) fail(where + ": slo entries must be objects");
  reject_unknown_keys(obj, {"kind", "threshold"}, where);
  Slo slo;
  auto kind_name = require_string(obj, "kind", where);
  auto kind = slo_kind_from_string(kind_name);
  if (!kind) fail(where + ": unknown slo kind '" + kind_name + "'");
  slo.kind = *kind;
  const json& threshold = require(obj, "threshold", where);
  if (!threshold.is_number()) fail(where + ": 'threshold' must be a number");
  slo.threshold = threshold.get<double>();
  return slo;
}

Expectation parse_expectation(const json& obj, const std::string& where) {
  if (!obj.is_object()) fail(where + ": expectation entries must be objects");
  Expectation e;
  auto kind_name = require_string(obj, "kind", where);
  auto kind = expectation_kind_from_string(kind_name);
  if (!kind) fail(where + ": unknown expectation kind '" + kind_name + "'");
  e.kind = *kind;
  switch (e.kind) {
    case ExpectationKind::kColumnPresent:
      reject_unknown_keys(obj, {"kind", "column"}, where);
      e.column = require_string(obj, "column", where);
      break;
    case ExpectationKind::kNonNullFraction: {
      reject_unknown_keys(obj, {"kind", "column", "min_fraction"}, where);
      e.column = require_string(obj, "column", where);
      const json& f = require(obj, "min_fraction", where);
      if (!f.is_number()) fail(where + ": 'min_fraction' must be a number");
      e.min_fraction = f.get<double>();
      break;
    }
    case ExpectationKind::kMinRowCount: {
      reject_unknown_keys(obj, {"kind", "min_rows"}, where);
      const json& n = require(obj, "min_rows", where);
      if (!n.is_number_integer()) fail(where + ": 'min_rows' must be an integer");
      e.min_rows = n.get<std::int64_t>();
      break;
    }
    case ExpectationKind::kMaxStalenessSeconds: {
      reject_unknown_keys(obj, {"kind", "max_seconds"}, where);
      const json& s = require(obj, "max_seconds", where);
      if (!s.is_number_integer()) fail(where + ": 'max_seconds' must be an integer");
      e.max_seconds = s.get<std::int64_t>();
      break;
    }
  }
  return e;
}

OutputPort parse_output_port(const json& obj, const std::string& product) {
  if (!obj.is_object()) fail(product + ": output_ports entries must be objects");
  std::string where = "output port";
  if (obj.contains("id") && obj["id"].is_string()) {
    where = "output port '" + obj["id"].get<std::string>() + "'";
  }
  reject_unknown_keys(obj, {"id", "interface", "address", "schema", "slos", "labels", "encryption"},
                      where);
  OutputPort port;
  port.id = require_string(obj, "id", where);
  auto iface_name = require_string(obj, "interface", where);
  auto iface = interface_type_from_string(iface_name);
  if (!iface) fail(where + ": unknown interface '" + iface_name + "'");
  port.interface_type = *iface;
  port.address = require_string(obj, "address", where);
  if (obj.contains("schema")) {
    if (!obj["schema"].is_array()) fail(where + ": 'schema' must be an array");
    for (const auto& col : obj["schema"]) port.schema.push_back(parse_column(col, where));
  }
  if (obj.contains("slos")) {
    if (!obj["slos"].is_array()) fail(where + ": 'slos' must be an array");
    for (const auto& slo : obj["slos"]) port.slos.push_back(parse_slo(slo, where));
  }
  if (obj.contains("labels")) {
    port.declared_labels = string_set(obj["labels"], where + ": 'labels'");
  }
  if (obj.contains("encryption")) {
    if (!obj["encryption"].is_boolean()) fail(where + ": 'encryption' must be a boolean");
    port.encryption_enabled = obj["encryption"].get<bool>();
  }
  return port;
}

InputTarget parse_target(const json& obj, const std::string& where) {
  if (!obj.is_object()) fail(where + ": 'target' must be an object");
  const bool has_mesh = obj.contains("product") || obj.contains("port");
  const bool has_external = obj.contains("uri");
  if (has_mesh && has_external) {
    fail(where + ": target must name either a mesh output port or an external source, not both");
  }
  if (has_mesh) {
    reject_unknown_keys(obj, {"product", "port"}, where + ": target");
    MeshPortRef ref;
    ref.product_id = require_string(obj, "product", where + ": target");
    ref.port_id = require_string(obj, "port", where + ": target");
    return ref;
  }
  if (has_external) {
    reject_unknown_keys(obj, {"uri", "labels"}, where + ": target");
    ExternalSourceRef ref;
    ref.uri = require_string(obj, "uri", where + ": target");
    if (obj.contains("labels")) {
      ref.manual_labels = string_set(obj["labels"], where + ": target labels");
    }
    return ref;
  }
  fail(where + ": target must carry product/port or uri");
}

InputPort parse_input_port(const json& obj, const std::string& product) {
  if (!obj.is_object()) fail(product + ": input_ports entries must be objects");
  std::string where = "input port";
  if (obj.contains("id") && obj["id"].is_string()) {
    where = "input port '" + obj["id"].get<std::string>() + "'";
  }
  reject_unknown_keys(obj, {"id", "target", "style", "projection", "expectations"}, where);
  InputPort port;
  port.id = require_string(obj, "id", where);
  port.target = parse_target(require(obj, "target", where), where);
  auto style_name = require_string(obj, "style", where);
  auto style = consumption_style_from_string(style_name);
  if (!style) fail(where + ": unknown consumption style '" + style_name + "'");
  port.style = *style;
  if (obj.contains("projection")) {
    if (!obj["projection"].is_array()) fail(where + ": 'projection' must be an array");
    std::vector<std::string> cols;
    for (const auto& c : obj["projection"]) {
      if (!c.is_string()) fail(where + ": projection columns must be strings");
      cols.push_back(c.get<std::string>());
    }
    port.projection = std::move(cols);
  }
  // Style/projection consistency is structural, not merely advisory.
  if (port.style == ConsumptionStyle::kByProjection && !port.projection) {
    fail(where + ": consumption style by_projection requires a 'projection' list");
  }
  if (port.style != ConsumptionStyle::kByProjection && port.projection) {
    fail(where + ": 'projection' is only valid with style by_projection");
  }
  if (obj.contains("expectations")) {
    if (!obj["expectations"].is_array()) fail(where + ": 'expectations' must be an array");
    for (const auto& e : obj["expectations"]) {
      port.expectations.push_back(parse_expectation(e, where));
    }
  }
  return port;
}

json column_to_json(const Column& col) {
  json obj;
  obj["name"] = col.name;
  obj["type"] = to_string(col.type);
  if (col.subject_ref) obj["subject_ref"] = true;
  return obj;
}

json expectation_to_json(const Expectation& e) {
  json obj;
  obj["kind"] = to_string(e.kind);
  switch (e.kind) {
    case ExpectationKind::kColumnPresent:
      obj["column"] = e.column;
      break;
    case ExpectationKind::kNonNullFraction:
      obj["column"] = e.column;
      obj["min_fraction"] = e.min_fraction;
      break;
    case ExpectationKind::kMinRowCount:
      obj["min_rows"] = e.min_rows;
      break;
    case ExpectationKind::kMaxStalenessSeconds:
      obj["max_seconds"] = e.max_seconds;
      break;
  }
  return obj;
}

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
  });
}

}  // namespace

ProductDescriptor parse_descriptor(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MeshError(ErrorCode::kParse, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("descriptor must be a JSON object");
  reject_unknown_keys(doc, {"name", "domain", "archetype", "description", "output_ports", "input_ports"},
                      "descriptor");
  ProductDescriptor d;
  auto name = require_string(doc, "name", "descriptor");
  d.domain = require_string(doc, "domain", "descriptor");
  d.id = d.domain + "/" + name;
  auto archetype_name = require_string(doc, "archetype", "descriptor");
  auto archetype = archetype_from_string(archetype_name);
  if (!archetype) fail("descriptor: unknown archetype '" + archetype_name + "'");
  d.archetype = *archetype;
  if (doc.contains("description")) {
    if (!doc["description"].is_string()) fail("descriptor: 'description' must be a string");
    d.description = doc["description"].get<std::string>();
  }
  const json& outs = require(doc, "output_ports", "descriptor");
  if (!outs.is_array()) fail("descriptor: 'output_ports' must be an array");
  for (const auto& port : outs) d.output_ports.push_back(parse_output_port(port, d.id));
  const json& ins = require(doc, "input_ports", "descriptor");
  if (!ins.is_array()) fail("descriptor: 'input_ports' must be an array");
  for (const auto& port : ins) d.input_ports.push_back(parse_input_port(port, d.id));
  return d;
}

json descriptor_to_json(const ProductDescriptor& d) {
  json doc;
  doc["name"] = d.name();
  doc["domain"] = d.domain;
  doc["archetype"] = to_string(d.archetype);
  if (!d.description.empty()) doc["description"] = d.description;
  doc["output_ports"] = json::array();
  for (const auto& port : d.output_ports) {
    json obj;
    obj["id"] = port.id;
    obj["interface"] = to_string(port.interface_type);
    obj["address"] = port.address;
    if (!port.schema.empty()) {
      obj["schema"] = json::array();
      for (const auto& col : port.schema) obj["schema"].push_back(column_to_json(col));
    }
    if (!port.slos.empty()) {
      obj["slos"] = json::array();
      for (const auto& slo : port.slos) {
        obj["slos"].push_back({{"kind", to_string(slo.kind)}, {"threshold", slo.threshold}});
      }
    }
    if (!port.declared_labels.empty()) obj["labels"] = port.declared_labels;
    if (port.encryption_enabled) obj["encryption"] = true;
    doc["output_ports"].push_back(std::move(obj));
  }
  doc["input_ports"] = json::array();
  for (const auto& port : d.input_ports) {
    json obj;
    obj["id"] = port.id;
    if (const auto* ref = std::get_if<MeshPortRef>(&port.target)) {
      obj["target"] = {{"product", ref->product_id}, {"port", ref->port_id}};
    } else {
      const auto& ext = std::get<ExternalSourceRef>(port.target);
      obj["target"] = {{"uri", ext.uri}};
      if (!ext.manual_labels.empty()) obj["target"]["labels"] = ext.manual_labels;
    }
    obj["style"] = to_string(port.style);
    if (port.projection) obj["projection"] = *port.projection;
    if (!port.expectations.empty()) {
      obj["expectations"] = json::array();
      for (const auto& e : port.expectations) obj["expectations"].push_back(expectation_to_json(e));
    }
    doc["input_ports"].push_back(std::move(obj));
  }
  return doc;
}

std::string serialize_descriptor(const ProductDescriptor& d) {
  return descriptor_to_json(d).dump(2) + "\n";
}

std::vector<std::string> validate_descriptor(const ProductDescriptor& d) {
  std::vector<std::string> errors;
  auto err = [&errors](const std::string& msg) { errors.push_back(msg); };

  auto slash = d.id.find('/');
  if (d.domain.empty() || !valid_identifier(d.domain)) {
    err("domain must be a non-empty lowercase identifier");
  }
  if (slash == std::string::npos || d.id.substr(0, slash) != d.domain) {
    err("product id must be '<domain>/<name>'");
  } else if (!valid_identifier(d.id.substr(slash + 1))) {
    err("product name must be a non-empty lowercase identifier");
  }

  if (d.output_ports.empty()) {
    err("product must declare at least one output port");
  }

  std::set<std::string> port_ids;
  auto check_port_id = [&](const std::string& id, const char* kind) {
    if (!valid_identifier(id)) {
      err(std::string(kind) + " port id '" + id + "' must be a non-empty lowercase identifier");
    }
    if (!port_ids.insert(id).second) {
      err("duplicate port id '" + id + "'");
    }
  };

  for (const auto& port : d.output_ports) {
    check_port_id(port.id, "output");
    const std::string where = "output port '" + port.id + "'";
    if (port.address.empty()) err(where + ": address must be non-empty");
    if (port.interface_type == InterfaceType::kSql && port.schema.empty()) {
      err(where + ": sql ports require a non-empty schema");
    }
    std::set<std::string> columns;
    for (const auto& col : port.schema) {
      if (col.name.empty()) err(where + ": schema column names must be non-empty");
      if (!columns.insert(col.name).second) {
        err(where + ": duplicate schema column '" + col.name + "'");
      }
    }
    for (const auto& slo : port.slos) {
      if (slo.threshold <= 0) {
        err(where + ": slo " + to_string(slo.kind) + " threshold must be > 0");
      } else if (slo.kind != SloKind::kFreshnessSeconds && slo.threshold > 100) {
        err(where + ": slo " + to_string(slo.kind) + " threshold must be in (0, 100]");
      }
    }
  }

  for (const auto& port : d.input_ports) {
    check_port_id(port.id, "input");
    const std::string where = "input port '" + port.id + "'";
    if (const auto* ext = std::get_if<ExternalSourceRef>(&port.target)) {
      if (ext->uri.empty()) err(where + ": external source uri must be non-empty");
    } else {
      const auto& ref = std::get<MeshPortRef>(port.target);
      if (ref.product_id.empty() || ref.port_id.empty()) {
        err(where + ": target product and port must be non-empty");
      }
    }
    if (port.style == ConsumptionStyle::kByProjection) {
      if (!port.projection || port.projection->empty()) {
        err(where + ": by_projection requires a non-empty projection list");
      }
    } else if (port.projection) {
      err(where + ": projection is only valid with style by_projection");
    }
    for (const auto& e : port.expectations) {
      switch (e.kind) {
        case ExpectationKind::kColumnPresent:
          if (e.column.empty()) err(where + ": column_present expectation needs a column");
          break;
        case ExpectationKind::kNonNullFraction:
          if (e.column.empty()) err(where + ": non_null_fraction expectation needs a column");
          if (e.min_fraction < 0 || e.min_fraction > 1) {
            err(where + ": non_null_fraction must be within [0, 1]");
          }
          break;
        case ExpectationKind::kMinRowCount:
          if (e.min_rows < 0) err(where + ": min_row_count must be >= 0");
          break;
        case ExpectationKind::kMaxStalenessSeconds:
          if (e.max_seconds <= 0) err(where + ": max_staleness_seconds must be > 0");
          break;
      }
    }
  }
  return errors;
}

}  // namespace mesh
