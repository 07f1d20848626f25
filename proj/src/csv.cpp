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

#include "mesh/csv.hpp"

#include <fstream>
#include <sstream>

#include "mesh/errors.hpp"

namespace mesh {

namespace {

std::vector<std::vector<std::string>> parse_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (in_quotes) {
    throw MeshError(ErrorCode::kParse, "CSV ends inside a quoted field");
  }
  if (field_started || !field.empty() || !record.empty()) {
    end_record();
  }
  return records;
}

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\n\r") != std::string::npos;
}

}  // namespace

std::optional<std::size_t> CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

double CsvTable::non_null_fraction(std::size_t column) const {
  if (rows.empty()) return 1.0;
  std::size_t non_null = 0;
  for (const auto& row : rows) {
    if (column < row.size() && !row[column].empty()) ++non_null;
  }
  return static_cast<double>(non_null) / static_cast<double>(rows.size());
}

CsvTable parse_csv(const std::string& text) {
  auto records = parse_records(text);
  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  return table;
}

std::string write_csv(const CsvTable& table) {
  std::ostringstream out;
  auto write_record = [&out](const std::vector<std::string>& record) {
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (i > 0) out << ',';
      if (needs_quoting(record[i])) {
        out << '"';
        for (char c : record[i]) {
          if (c == '"') out << "\"\"";
          else out << c;
        }
        out << '"';
      } else {
        out << record[i];
      }
    }
    out << '\n';
  };
  write_record(table.header);
  for (const auto& row : table.rows) write_record(row);
  return out.str();
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MeshError(ErrorCode::kIo, "cannot read '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw MeshError(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  }
  out << write_csv(table);
}

}  // namespace mesh
