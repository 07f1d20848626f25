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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mesh {

// Minimal RFC-4180-ish table: first record is the header, quotes and embedded
// commas/newlines supported. Desk-scale stores for sql and streaming ports.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column_index(const std::string& name) const;
  // Fraction of non-empty cells in the column; 1.0 for an empty table.
  double non_null_fraction(std::size_t column) const;

  bool operator==(const CsvTable&) const = default;
};

CsvTable parse_csv(const std::string& text);
std::string write_csv(const CsvTable& table);

CsvTable read_csv_file(const std::filesystem::path& path);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);

}  // namespace mesh
