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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mesh {

namespace event_kind {
inline constexpr const char* kLabelDefined = "label_defined";
inline constexpr const char* kProductRegistered = "product_registered";
inline constexpr const char* kProductDecommissioned = "product_decommissioned";
inline constexpr const char* kPortTagged = "port_tagged";
inline constexpr const char* kOverrideRequested = "override_requested";
inline constexpr const char* kOverrideReviewed = "override_reviewed";
inline constexpr const char* kPolicyApplied = "policy_applied";
inline constexpr const char* kAccessDecided = "access_decided";
inline constexpr const char* kTokenIssued = "token_issued";
inline constexpr const char* kKeyCreated = "key_created";
inline constexpr const char* kKeyHandedOut = "key_handed_out";
inline constexpr const char* kContractRun = "contract_run";
inline constexpr const char* kSubjectForgotten = "subject_forgotten";
}  // namespace event_kind

struct EventRecord {
  std::uint64_t seq = 0;  // strictly increasing from 1, gapless
  std::int64_t timestamp = 0;
  std::string actor;
  std::string kind;
  nlohmann::json payload;
};

nlohmann::json event_to_json(const EventRecord& event);
EventRecord event_from_json(const nlohmann::json& doc);

// Append-only JSON-lines journal: one canonical UTF-8 JSON object per line,
// LF-terminated. The log is the system of record; state is a fold over it.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path);

  // Throws kCorruptLog naming the offending line/sequence number on gaps,
  // non-monotonic sequences or unparseable lines.
  std::vector<EventRecord> read_all() const;

  // Durable before return (flushed); the caller assigns seq.
  void append(const EventRecord& event);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mesh
