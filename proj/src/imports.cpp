// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/imports.hpp"

#include <set>

namespace nbtrace {

using syntax::Expr;
using syntax::ExprKind;
using syntax::Stmt;
using syntax::StmtKind;

void ImportTable::bind(std::string alias, std::string module, int cell) {
  if (alias.empty() || module.empty()) return;
  entries_[std::move(alias)] = ImportEntry{std::move(module), cell};
}

std::optional<std::string> ImportTable::resolve(std::string_view alias) const {
  if (const ImportEntry* e = find(alias)) return e->module;
  return std::nullopt;
}

const ImportEntry* ImportTable::find(std::string_view alias) const {
  auto it = entries_.find(alias);
  return it == entries_.end() ? nullptr : &it->second;
}

std::map<std::string, std::string> ImportTable::as_mapping() const {
  std::map<std::string, std::string> out;
  for (const auto& [alias, entry] : entries_) out.emplace(alias, entry.module);
  return out;
}

bool ImportTable::operator==(const ImportTable& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  for (; a != entries_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.module != b->second.module || a->second.cell != b->second.cell) {
      return false;
    }
  }
  return true;
}

namespace {

class ImportCollector : public syntax::Visitor {
 public:
  ImportCollector(int cell, ImportTable& table, Diagnostics* diagnostics)
      : cell_(cell), table_(table), diagnostics_(diagnostics) {}

  void visit_stmt(const Stmt& s) override {
    if (s.kind == StmtKind::Import) {
      for (const auto& a : s.aliases) {
        if (!a.asname.empty()) {
          table_.bind(a.asname, a.name, cell_);
        } else {
          // `import a.b` binds `a`.
          std::string head = a.name.substr(0, a.name.find('.'));
          table_.bind(head, head, cell_);
        }
      }
    } else if (s.kind == StmtKind::ImportFrom) {
      std::string module = std::string(static_cast<std::size_t>(s.level), '.') + s.name;
      for (const auto& a : s.aliases) {
        if (a.name == "*") {
          if (diagnostics_ != nullptr) {
            diagnostics_->push_back(Diagnostic{"", cell_, diag::kStarImport,
                                               "star import from '" + module + "' is not expanded"});
          }
          continue;
        }
        std::string qualified = module.empty() || module.back() == '.' ? module + a.name : module + "." + a.name;
        table_.bind(a.asname.empty() ? a.name : a.asname, qualified, cell_);
      }
    }
  }

 private:
  int cell_;
  ImportTable& table_;
  Diagnostics* diagnostics_;
};

class NameCollector : public syntax::Visitor {
 public:
  void visit_expr(const Expr& e) override {
    if (e.kind == ExprKind::Name) names.insert(e.text);
  }
  std::set<std::string, std::less<>> names;
};

}  // namespace

void collect_imports(const syntax::SyntaxTree& tree, int cell_index, ImportTable& table, Diagnostics* diagnostics) {
  ImportCollector c(cell_index, table, diagnostics);
  syntax::walk(tree, c);
}

void collect_imports(const Stmt& stmt, int cell_index, ImportTable& table, Diagnostics* diagnostics) {
  ImportCollector c(cell_index, table, diagnostics);
  syntax::walk(stmt, c);
}

std::optional<std::string> resolve_alias(const ImportTable& table, std::string_view name) {
  return table.resolve(name);
}

ImportTable imports_referenced_by(const Stmt& stmt, const ImportTable& table) {
  NameCollector names;
  syntax::walk(stmt, names);
  ImportTable out;
  for (const auto& [alias, entry] : table.entries()) {
    if (names.names.count(alias) != 0) out.bind(alias, entry.module, entry.cell);
  }
  return out;
}

std::string canonical_path(const Expr& func, const ImportTable& table) {
  std::string dotted = syntax::dotted_name(func);
  if (dotted.empty()) return {};
  std::size_t dot = dotted.find('.');
  std::string head = dotted.substr(0, dot);
  auto module = table.resolve(head);
  if (!module) return {};
  return dot == std::string::npos ? *module : *module + dotted.substr(dot);
}

}  // namespace nbtrace
