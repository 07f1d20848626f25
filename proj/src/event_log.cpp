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

#include "mesh/event_log.hpp"

#include <fstream>

#include "mesh/errors.hpp"

namespace mesh {

using nlohmann::json;

json event_to_json(const EventRecord& event) {
  json doc;
  doc["seq"] = event.seq;
  doc["ts"] = event.timestamp;
  doc["actor"] = event.actor;
  doc["kind"] = event.kind;
  doc["payload"] = event.payload;
  return doc;
}

EventRecord event_from_json(const json& doc) {
  EventRecord event;
  event.seq = doc.at("seq").get<std::uint64_t>();
  event.timestamp = doc.at("ts").get<std::int64_t>();
  event.actor = doc.at("actor").get<std::string>();
  event.kind = doc.at("kind").get<std::string>();
  event.payload = doc.at("payload");
  return event;
}

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  std::filesystem::create_directories(path_.parent_path(), ec);
}

std::vector<EventRecord> EventLog::read_all() const {
  std::vector<EventRecord> events;
  std::ifstream in(path_, std::ios::binary);
  if (!in) return events;  // no log yet: empty history

  std::string line;
  std::uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) {
      throw MeshError(ErrorCode::kCorruptLog,
                      "event log line " + std::to_string(line_number) + " is not valid JSON");
    }
    EventRecord event;
    try {
      event = event_from_json(doc);
    } catch (const json::exception& e) {
      throw MeshError(ErrorCode::kCorruptLog, "event log line " + std::to_string(line_number) +
                                                  " is malformed: " + e.what());
    }
    const std::uint64_t expected = events.size() + 1;
    if (event.seq != expected) {
      throw MeshError(ErrorCode::kCorruptLog,
                      "event log corrupt: expected sequence " + std::to_string(expected) +
                          ", found " + std::to_string(event.seq));
    }
    events.push_back(std::move(event));
  }
  return events;
}

void EventLog::append(const EventRecord& event) {
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) {
    throw MeshError(ErrorCode::kIo, "cannot append to event log '" + path_.string() + "'");
  }
  out << event_to_json(event).dump() << "\n";
  out.flush();
  if (!out) {
    throw MeshError(ErrorCode::kIo, "write to event log '" + path_.string() + "' failed");
  }
}

}  // namespace mesh
