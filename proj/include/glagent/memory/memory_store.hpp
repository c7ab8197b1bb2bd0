// Copyright 2026 The glagent Authors.
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
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "glagent/clock.hpp"
#include "glagent/json.hpp"
#include "glagent/llm/client.hpp"

namespace glagent::memory {

// Agent namespaces plus "engine".
const std::vector<std::string>& namespaces();
bool is_namespace(const std::string& name);

struct Event {
  std::size_t index = 0;
  double timestamp_ms = 0.0;
  std::string agent;
  std::string kind;
  Json payload;

  friend bool operator==(const Event&, const Event&) = default;
};

struct RunBundle {
  std::string run_id;
  std::map<std::string, std::map<std::string, Json>> entries;
  std::vector<Event> log;
  std::vector<llm::LlmCallRecord> call_records;

  Json to_json() const;
  // CorruptBundle on any structural problem.
  static RunBundle from_json(const Json& j);
  friend bool operator==(const RunBundle&, const RunBundle&) = default;
};

// The shared memory of one run. Writes are serialized; every put is also an
// event so the log shows who wrote what and when.
class MemoryStore {
 public:
  explicit MemoryStore(std::string run_id, const Clock* clock = nullptr);

  // UnknownNamespace. A second put to the same key logs an "overwrite" event.
  void put(const std::string& ns, const std::string& key, Json value);
  // KeyAbsent(namespace, key).
  Json get(const std::string& ns, const std::string& key) const;
  bool has(const std::string& ns, const std::string& key) const;
  bool has_namespace_data(const std::string& ns) const;

  void log_event(const std::string& agent, const std::string& kind, Json payload = Json::object());
  void append_call(const llm::LlmCallRecord& record);
  void set_call_records(std::vector<llm::LlmCallRecord> records);

  RunBundle bundle() const;
  const std::string& run_id() const { return bundle_.run_id; }

 private:
  void push_event(const std::string& agent, const std::string& kind, Json payload);

  const Clock* clock_;
  mutable std::mutex mu_;
  RunBundle bundle_;
};

// Sorted keys, two-space indent, trailing newline.
std::string dump_bundle(const RunBundle& b);
// IoFailure when the file cannot be written.
void export_run_bundle(const RunBundle& b, const std::filesystem::path& path);
// IoFailure when unreadable, CorruptBundle when it does not parse.
RunBundle load_run_bundle(const std::filesystem::path& path);

}  // namespace glagent::memory
