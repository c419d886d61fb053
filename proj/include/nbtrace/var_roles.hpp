// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

// Role analysis for names used as transform arguments: is a term a function
// definition, a bound lambda, or a plain variable, and what kind of value
// does an argument expression carry.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "nbtrace/syntax.hpp"

namespace nbtrace {

enum class ValueKind { DictionaryLiteral, NamedFunction, LambdaExpression, VariableOther };

std::string_view to_string(ValueKind kind);
std::optional<ValueKind> parse_value_kind(std::string_view text);

enum class TermRole { FunctionDefinition, LambdaExpression, VariableAssignment, NotFound };

struct VariableRoleReport {
  std::string term;
  TermRole role = TermRole::NotFound;
  std::optional<std::string> rendered_source;
  std::string message;
};

/// Definitions and bindings of one notebook, indexed once so per-name
/// lookups stay cheap. Last definition in document order wins.
class TermIndex {
 public:
  explicit TermIndex(const syntax::SyntaxTree& tree);

  VariableRoleReport analyze(std::string_view term) const;
  ValueKind classify(const syntax::Expr& expr) const;

  /// Value last assigned to `term` by a plain assignment outside function
  /// bodies, or null.
  const syntax::Expr* assigned_value(std::string_view term) const;

  /// True when the notebook binds `name` anywhere (assignment, loop target,
  /// parameter, import, def, class, ...).
  bool binds(std::string_view name) const { return bound_.count(name) != 0; }

 private:
  void scan(const syntax::StmtList& body, bool in_scope);

  std::map<std::string, syntax::StmtPtr, std::less<>> functions_;
  std::map<std::string, syntax::ExprPtr, std::less<>> assignments_;
  std::set<std::string, std::less<>> bound_;
};

/// Convenience wrappers that build a TermIndex over `tree`.
VariableRoleReport analyze_term(const syntax::SyntaxTree& tree, std::string_view term);
ValueKind classify_value(const syntax::Expr& expr, const syntax::SyntaxTree& tree);

/// Python builtins that never need a role lookup unless the notebook shadows them.
bool is_builtin_name(std::string_view name);

}  // namespace nbtrace
