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

#include "glagent/catalog/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "glagent/error.hpp"

namespace glagent::catalog {

extern const char* const kEmbeddedCatalog;

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<TaskLevel> levels_from(const Json& arr) {
  std::vector<TaskLevel> out;
  for (const auto& v : arr) out.push_back(level_from_string(v.get<std::string>()));
  return out;
}

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaViolation, "catalog: " + what); }

}  // namespace

const char* to_string(MemoryClass m) noexcept { return m == MemoryClass::Light ? "light" : "heavy"; }

MemoryClass memory_class_from_string(const std::string& s) {
  const std::string t = lower(trim(s));
  if (t == "light") return MemoryClass::Light;
  if (t == "heavy") return MemoryClass::Heavy;
  throw Error(ErrorCode::InvalidEnumValue, "memory_class: " + s);
}

const char* to_string(Efficiency e) noexcept { return e == Efficiency::None ? "none" : "prefer_fast"; }

Efficiency efficiency_from_string(const std::string& s) {
  const std::string t = lower(trim(s));
  if (t.empty() || t == "none") return Efficiency::None;
  if (t == "prefer_fast" || t == "fast" || t == "prefer fast") return Efficiency::PreferFast;
  throw Error(ErrorCode::InvalidEnumValue, "efficiency: " + s);
}

bool CatalogEntry::applies_to(TaskLevel level) const {
  return std::find(task_levels.begin(), task_levels.end(), level) != task_levels.end();
}

std::string CatalogEntry::class_name() const {
  const auto dot = qualified_path.rfind('.');
  return dot == std::string::npos ? qualified_path : qualified_path.substr(dot + 1);
}

Json ConstraintSet::to_json() const {
  Json j = Json::object();
  j["max_memory_class"] = max_memory_class ? Json(to_string(*max_memory_class)) : Json(nullptr);
  j["exclude_ops"] = exclude_ops;
  j["efficiency"] = to_string(efficiency);
  return j;
}

ConstraintSet ConstraintSet::from_json(const Json& j) {
  ConstraintSet c;
  if (j.is_null()) return c;
  if (j.is_string()) {
    const std::string t = lower(trim(j.get<std::string>()));
    if (t.empty() || t == "none") return c;
    throw Error(ErrorCode::InvalidEnumValue, "Constraints: " + j.get<std::string>());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidEnumValue, "Constraints: " + j.dump());
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const Json& v = it.value();
    if (k == "max_memory_class") {
      if (!v.is_null() && !(v.is_string() && lower(trim(v.get<std::string>())) == "none"))
        c.max_memory_class = memory_class_from_string(v.get<std::string>());
    } else if (k == "exclude_ops") {
      if (v.is_string()) {
        if (!trim(v.get<std::string>()).empty()) c.exclude_ops.push_back(trim(v.get<std::string>()));
      } else if (v.is_array()) {
        for (const auto& x : v) c.exclude_ops.push_back(trim(x.get<std::string>()));
      } else if (!v.is_null()) {
        throw Error(ErrorCode::InvalidEnumValue, "exclude_ops: " + v.dump());
      }
    } else if (k == "efficiency") {
      c.efficiency = v.is_null() ? Efficiency::None : efficiency_from_string(v.get<std::string>());
    } else {
      throw Error(ErrorCode::InvalidEnumValue, "Constraints: unsupported key '" + k + "'");
    }
  }
  return c;
}

Catalog Catalog::from_json(const Json& j) {
  Catalog c;
  c.source_ = j;
  try {
    for (const auto& m : j.at("modules")) {
      const std::string module = m.at("module").get<std::string>();
      if (c.entries_.count(module)) schema("module listed twice: " + module);
      c.module_order_.push_back(module);
      auto& list = c.entries_[module];
      std::set<std::string> names;
      for (const auto& e : m.at("entries")) {
        CatalogEntry en;
        en.module = module;
        en.op_name = e.at("op_name").get<std::string>();
        en.qualified_path = e.at("qualified_path").get<std::string>();
        en.doc_snippet = e.at("doc_snippet").get<std::string>();
        en.task_levels = levels_from(e.at("task_levels"));
        en.differentiable_compatible = e.at("differentiable_compatible").get<bool>();
        en.is_coarsening = e.at("is_coarsening").get<bool>();
        en.memory_class = memory_class_from_string(e.at("memory_class").get<std::string>());
        en.default_candidate = e.value("default_candidate", false);
        en.implemented = e.value("implemented", false);
        if (!names.insert(en.op_name).second) schema("duplicate entry " + module + "/" + en.op_name);
        if (trim(en.doc_snippet).empty()) schema("empty doc snippet for " + module + "/" + en.op_name);
        if (en.is_coarsening && en.differentiable_compatible)
          schema("coarsening op marked differentiable: " + module + "/" + en.op_name);
        list.push_back(std::move(en));
      }
    }
    std::set<std::string> tnames;
    for (const auto& t : j.at("transforms")) {
      TransformEntry te;
      te.name = t.at("name").get<std::string>();
      te.doc_snippet = t.at("doc_snippet").get<std::string>();
      te.applicable_levels = levels_from(t.at("applicable_levels"));
      if (!tnames.insert(te.name).second) schema("duplicate transform " + te.name);
      c.transforms_.push_back(std::move(te));
    }
    for (auto it = j.at("instance_modules").begin(); it != j.at("instance_modules").end(); ++it) {
      const Instance inst = instance_from_string(it.key());
      auto mods = it.value().get<std::vector<std::string>>();
      for (const auto& m : mods)
        if (!c.entries_.count(m)) schema("instance " + it.key() + " names unknown module " + m);
      c.instance_modules_[inst] = std::move(mods);
    }
  } catch (const Json::exception& e) {
    schema(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaViolation) throw;
    schema(e.what());
  }
  return c;
}

Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read catalog " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(Json::parse(ss.str()));
  } catch (const Json::exception& e) {
    schema(e.what());
  }
}

const Catalog& Catalog::builtin() {
  static const Catalog c = from_json(Json::parse(kEmbeddedCatalog));
  return c;
}

bool Catalog::has_module(const std::string& module) const { return entries_.count(module) != 0; }

std::vector<CatalogEntry> Catalog::lookup_operations(const std::string& module, TaskLevel level) const {
  auto it = entries_.find(module);
  if (it == entries_.end()) throw Error(ErrorCode::UnknownModule, module);
  std::vector<CatalogEntry> out;
  for (const auto& e : it->second)
    if (e.applies_to(level)) out.push_back(e);
  return out;
}

std::vector<TransformEntry> Catalog::lookup_transforms(TaskLevel level) const {
  std::vector<TransformEntry> out;
  for (const auto& t : transforms_)
    if (std::find(t.applicable_levels.begin(), t.applicable_levels.end(), level) != t.applicable_levels.end())
      out.push_back(t);
  return out;
}

const CatalogEntry* Catalog::find(const std::string& module, const std::string& op) const {
  auto it = entries_.find(module);
  if (it == entries_.end()) return nullptr;
  for (const auto& e : it->second)
    if (e.op_name == op) return &e;
  return nullptr;
}

bool Catalog::resolves_op(const std::string& name) const {
  for (const auto& [m, list] : entries_)
    for (const auto& e : list)
      if (matches_preference(e, name)) return true;
  return false;
}

const std::vector<std::string>& Catalog::instance_modules(Instance instance) const {
  auto it = instance_modules_.find(instance);
  if (it == instance_modules_.end()) schema(std::string("no module list for instance ") + to_string(instance));
  return it->second;
}

bool matches_preference(const CatalogEntry& e, const std::string& preference) {
  const std::string p = lower(trim(preference));
  if (p.empty()) return false;
  return p == lower(e.op_name) || p == lower(e.class_name());
}

std::vector<CatalogEntry> filter_candidates(const std::vector<CatalogEntry>& entries, const ConstraintSet& constraints,
                                            const std::string& preference) {
  std::vector<CatalogEntry> kept;
  for (const auto& e : entries) {
    if (constraints.max_memory_class == MemoryClass::Light && e.memory_class == MemoryClass::Heavy) continue;
    const bool excluded = std::any_of(constraints.exclude_ops.begin(), constraints.exclude_ops.end(),
                                      [&](const std::string& x) { return matches_preference(e, x); });
    if (excluded) continue;
    kept.push_back(e);
  }
  if (kept.empty())
    throw Error(ErrorCode::AllCandidatesFiltered,
                entries.empty() ? std::string("no candidates") : entries.front().module + ": constraints remove every candidate");
  auto pref = std::find_if(kept.begin(), kept.end(), [&](const CatalogEntry& e) { return matches_preference(e, preference); });
  if (pref != kept.end() && pref != kept.begin()) std::rotate(kept.begin(), pref, pref + 1);
  return kept;
}

}  // namespace glagent::catalog
