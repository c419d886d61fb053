// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "nbtrace/diagnostics.hpp"
#include "nbtrace/syntax.hpp"

namespace nbtrace {

struct ImportEntry {
  std::string module;  // canonical dotted path, never empty
  int cell = 0;        // cell of the import that last bound this alias
};

/// Alias ("nickname") to canonical module path for one notebook.
/// Later imports of the same alias overwrite earlier ones.
class ImportTable {
 public:
  void bind(std::string alias, std::string module, int cell);
  std::optional<std::string> resolve(std::string_view alias) const;
  const ImportEntry* find(std::string_view alias) const;

  const std::map<std::string, ImportEntry, std::less<>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// alias -> module, the shape serialized into trace records.
  std::map<std::string, std::string> as_mapping() const;

  bool operator==(const ImportTable&) const;

 private:
  std::map<std::string, ImportEntry, std::less<>> entries_;
};

/// Binds every import in `tree` (nested blocks included) in document order.
/// Star imports are reported through `diagnostics` and not expanded.
void collect_imports(const syntax::SyntaxTree& tree, int cell_index, ImportTable& table,
                     Diagnostics* diagnostics = nullptr);
void collect_imports(const syntax::Stmt& stmt, int cell_index, ImportTable& table,
                     Diagnostics* diagnostics = nullptr);

std::optional<std::string> resolve_alias(const ImportTable& table, std::string_view name);

/// Entries whose alias occurs as a name expression inside `stmt`.
ImportTable imports_referenced_by(const syntax::Stmt& stmt, const ImportTable& table);

/// Canonical dotted path of a call target such as `pd.read_csv`, resolved
/// through the table; empty when the head name is not an import.
std::string canonical_path(const syntax::Expr& func, const ImportTable& table);

}  // namespace nbtrace
