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

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mesh/types.hpp"

namespace mesh {

// Machine-readable data product description (".dp.json"). The descriptor
// structurally mirrors DataProduct; see docs/descriptor.md for the field
// reference. Parsing is strict: unknown keys are rejected so a descriptor
// doubles as a contract.
using ProductDescriptor = DataProduct;

// Throws MeshError(kParse) on malformed JSON and MeshError(kInvalidDescriptor)
// on structural problems (missing keys, unknown keys, unknown enum values,
// projection/style mismatches).
ProductDescriptor parse_descriptor(const std::string& text);

// Canonical form: UTF-8, sorted keys, 2-space indentation, LF line endings,
// trailing newline. Byte-identical across runs, so descriptors can be
// golden-filed and content-hashed.
std::string serialize_descriptor(const ProductDescriptor& descriptor);

nlohmann::json descriptor_to_json(const ProductDescriptor& descriptor);

// Local (non-graph) invariants; an empty list means valid. Graph-level checks
// (reference resolution, cycles, label registration) happen at registration.
std::vector<std::string> validate_descriptor(const ProductDescriptor& descriptor);

}  // namespace mesh
