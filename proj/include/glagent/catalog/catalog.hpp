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
#include <optional>
#include <string>
#include <vector>

#include "glagent/genotype.hpp"
#include "glagent/json.hpp"

namespace glagent::catalog {

enum class MemoryClass { Light, Heavy };
const char* to_string(MemoryClass m) noexcept;
MemoryClass memory_class_from_string(const std::string& s);

enum class Efficiency { None, PreferFast };
const char* to_string(Efficiency e) noexcept;
Efficiency efficiency_from_string(const std::string& s);

struct CatalogEntry {
  std::string module;
  std::string op_name;
  std::string qualified_path;
  std::string doc_snippet;
  std::vector<TaskLevel> task_levels;
  bool differentiable_compatible = true;
  bool is_coarsening = false;
  MemoryClass memory_class = MemoryClass::Light;
  // Member of the instance's base candidate table.
  bool default_candidate = false;
  // The engine can build it.
  bool implemented = false;

  bool applies_to(TaskLevel level) const;
  // Last dotted component of qualified_path, e.g. "GCNConv".
  std::string class_name() const;
  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

struct TransformEntry {
  std::string name;
  std::string doc_snippet;
  std::vector<TaskLevel> applicable_levels;
  friend bool operator==(const TransformEntry&, const TransformEntry&) = default;
};

struct ConstraintSet {
  std::optional<MemoryClass> max_memory_class;
  std::vector<std::string> exclude_ops;
  Efficiency efficiency = Efficiency::None;

  bool empty() const { return !max_memory_class && exclude_ops.empty() && efficiency == Efficiency::None; }
  Json to_json() const;
  // InvalidEnumValue on a key outside {max_memory_class, exclude_ops, efficiency}.
  static ConstraintSet from_json(const Json& j);
  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;
};

class Catalog {
 public:
  // SchemaViolation when a catalog invariant is broken.
  static Catalog from_json(const Json& j);
  static Catalog load(const std::filesystem::path& path);
  // The catalog compiled into the library.
  static const Catalog& builtin();

  const std::vector<std::string>& module_names() const { return module_order_; }
  bool has_module(const std::string& module) const;

  // Entries of a module applicable at a level, in registry order. UnknownModule.
  std::vector<CatalogEntry> lookup_operations(const std::string& module, TaskLevel level) const;
  std::vector<TransformEntry> lookup_transforms(TaskLevel level) const;
  const std::vector<TransformEntry>& transforms() const { return transforms_; }

  const CatalogEntry* find(const std::string& module, const std::string& op) const;
  // True when some module lists the op under its name or class name.
  bool resolves_op(const std::string& name) const;
  // Modules the instance backbone is built from, in canonical order.
  const std::vector<std::string>& instance_modules(Instance instance) const;

  void clear_transforms() { transforms_.clear(); }
  Json to_json() const { return source_; }

 private:
  std::vector<std::string> module_order_;
  std::map<std::string, std::vector<CatalogEntry>> entries_;
  std::vector<TransformEntry> transforms_;
  std::map<Instance, std::vector<std::string>> instance_modules_;
  Json source_;
};

// Case-insensitive match of a preference against the op name or class name.
bool matches_preference(const CatalogEntry& e, const std::string& preference);

// Drops entries that violate constraints, then moves an entry matching the
// preference to the front. AllCandidatesFiltered when nothing survives.
std::vector<CatalogEntry> filter_candidates(const std::vector<CatalogEntry>& entries, const ConstraintSet& constraints,
                                            const std::string& preference);

}  // namespace glagent::catalog
