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

#include "glagent/memory/memory_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "glagent/error.hpp"

namespace glagent::memory {

const std::vector<std::string>& namespaces() {
  static const std::vector<std::string> names = {"manager",   "data",   "configuration", "searching",
                                                 "tuning",    "response", "engine"};
  return names;
}

bool is_namespace(const std::string& name) {
  const auto& n = namespaces();
  return std::find(n.begin(), n.end(), name) != n.end();
}

Json RunBundle::to_json() const {
  Json ents = Json::object();
  for (const auto& [ns, kv] : entries) {
    Json m = Json::object();
    for (const auto& [k, v] : kv) m[k] = v;
    ents[ns] = std::move(m);
  }
  Json log_j = Json::array();
  for (const auto& e : log)
    log_j.push_back(Json{{"index", e.index},
                         {"timestamp_ms", e.timestamp_ms},
                         {"agent", e.agent},
                         {"kind", e.kind},
                         {"payload", e.payload}});
  Json calls = Json::array();
  for (const auto& c : call_records) calls.push_back(c.to_json());
  return Json{{"run_id", run_id}, {"entries", ents}, {"log", log_j}, {"call_records", calls}};
}

RunBundle RunBundle::from_json(const Json& j) {
  try {
    RunBundle b;
    b.run_id = j.at("run_id").get<std::string>();
    for (auto it = j.at("entries").begin(); it != j.at("entries").end(); ++it) {
      if (!is_namespace(it.key())) throw Error(ErrorCode::CorruptBundle, "unknown namespace " + it.key());
      if (!it.value().is_object()) throw Error(ErrorCode::CorruptBundle, "namespace " + it.key() + " is not a map");
      auto& dst = b.entries[it.key()];
      for (auto kv = it.value().begin(); kv != it.value().end(); ++kv) dst[kv.key()] = kv.value();
    }
    double last = -1.0;
    std::size_t expected = 0;
    for (const auto& ej : j.at("log")) {
      Event e;
      e.index = ej.at("index").get<std::size_t>();
      e.timestamp_ms = ej.at("timestamp_ms").get<double>();
      e.agent = ej.at("agent").get<std::string>();
      e.kind = ej.at("kind").get<std::string>();
      e.payload = ej.at("payload");
      if (e.index != expected++) throw Error(ErrorCode::CorruptBundle, "event indices are not contiguous");
      if (e.timestamp_ms < last) throw Error(ErrorCode::CorruptBundle, "event timestamps decrease");
      last = e.timestamp_ms;
      b.log.push_back(std::move(e));
    }
    for (const auto& cj : j.at("call_records")) b.call_records.push_back(llm::LlmCallRecord::from_json(cj));
    return b;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::CorruptBundle, e.what());
  }
}

MemoryStore::MemoryStore(std::string run_id, const Clock* clock) : clock_(clock) {
  bundle_.run_id = std::move(run_id);
}

void MemoryStore::push_event(const std::string& agent, const std::string& kind, Json payload) {
  Event e;
  e.index = bundle_.log.size();
  e.timestamp_ms = clock_ ? clock_->now_ms() : 0.0;
  if (!bundle_.log.empty()) e.timestamp_ms = std::max(e.timestamp_ms, bundle_.log.back().timestamp_ms);
  e.agent = agent;
  e.kind = kind;
  e.payload = std::move(payload);
  bundle_.log.push_back(std::move(e));
}

void MemoryStore::put(const std::string& ns, const std::string& key, Json value) {
  if (!is_namespace(ns)) throw Error(ErrorCode::UnknownNamespace, ns);
  std::lock_guard<std::mutex> lock(mu_);
  auto& m = bundle_.entries[ns];
  const bool overwrite = m.count(key) != 0;
  m[key] = std::move(value);
  push_event(ns, overwrite ? "overwrite" : "put", Json{{"key", key}});
}

Json MemoryStore::get(const std::string& ns, const std::string& key) const {
  if (!is_namespace(ns)) throw Error(ErrorCode::UnknownNamespace, ns);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = bundle_.entries.find(ns);
  if (it == bundle_.entries.end() || !it->second.count(key)) throw Error(ErrorCode::KeyAbsent, ns + "/" + key);
  return it->second.at(key);
}

bool MemoryStore::has(const std::string& ns, const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = bundle_.entries.find(ns);
  return it != bundle_.entries.end() && it->second.count(key) != 0;
}

bool MemoryStore::has_namespace_data(const std::string& ns) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = bundle_.entries.find(ns);
  return it != bundle_.entries.end() && !it->second.empty();
}

void MemoryStore::log_event(const std::string& agent, const std::string& kind, Json payload) {
  std::lock_guard<std::mutex> lock(mu_);
  push_event(agent, kind, std::move(payload));
}

void MemoryStore::append_call(const llm::LlmCallRecord& record) {
  std::lock_guard<std::mutex> lock(mu_);
  bundle_.call_records.push_back(record);
}

void MemoryStore::set_call_records(std::vector<llm::LlmCallRecord> records) {
  std::lock_guard<std::mutex> lock(mu_);
  bundle_.call_records = std::move(records);
}

RunBundle MemoryStore::bundle() const {
  std::lock_guard<std::mutex> lock(mu_);
  return bundle_;
}

std::string dump_bundle(const RunBundle& b) {
  return b.to_json().dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

void export_run_bundle(const RunBundle& b, const std::filesystem::path& path) {
  const std::string text = dump_bundle(b);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

RunBundle load_run_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::CorruptBundle, path.string() + ": " + e.what());
  }
  return RunBundle::from_json(j);
}

}  // namespace glagent::memory
