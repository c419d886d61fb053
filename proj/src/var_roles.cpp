// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/var_roles.hpp"

#include <string>

namespace nbtrace {

using syntax::Expr;
using syntax::ExprKind;
using syntax::OtherExprKind;
using syntax::OtherStmtKind;
using syntax::Stmt;
using syntax::StmtKind;

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::DictionaryLiteral:
      return "DictionaryLiteral";
    case ValueKind::NamedFunction:
      return "NamedFunction";
    case ValueKind::LambdaExpression:
      return "LambdaExpression";
    case ValueKind::VariableOther:
      return "VariableOther";
  }
  return "VariableOther";
}

std::optional<ValueKind> parse_value_kind(std::string_view text) {
  for (ValueKind k : {ValueKind::DictionaryLiteral, ValueKind::NamedFunction, ValueKind::LambdaExpression,
                      ValueKind::VariableOther}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

namespace {

void bind_target(const Expr& target, std::set<std::string, std::less<>>& out) {
  if (target.is(ExprKind::Name)) {
    out.insert(target.text);
  } else if (target.is(OtherExprKind::Tuple) || target.is(OtherExprKind::List)) {
    for (const auto& i : target.items) bind_target(*i, out);
  } else if (target.is(OtherExprKind::Starred)) {
    bind_target(*target.items[0], out);
  }
}

void bind_params(const std::vector<syntax::Param>& params, std::set<std::string, std::less<>>& out) {
  for (const auto& p : params) {
    if (!p.name.empty()) out.insert(p.name);
  }
}

// Names bound by expressions: lambda parameters, comprehension targets, walrus.
class ExprBindings : public syntax::Visitor {
 public:
  explicit ExprBindings(std::set<std::string, std::less<>>& out) : out_(out) {}
  void visit_expr(const Expr& e) override {
    if (e.is(ExprKind::Lambda)) bind_params(e.params, out_);
    if (e.is(OtherExprKind::NamedExpr)) bind_target(*e.items[0], out_);
    for (const auto& g : e.generators) bind_target(*g.target, out_);
  }

 private:
  std::set<std::string, std::less<>>& out_;
};

class StmtBindings : public syntax::Visitor {
 public:
  explicit StmtBindings(std::set<std::string, std::less<>>& out) : out_(out), exprs_(out) {}
  void visit_stmt(const Stmt& s) override {
    switch (s.kind) {
      case StmtKind::Assign:
      case StmtKind::AugAssign:
      case StmtKind::For:
        for (const auto& t : s.targets) bind_target(*t, out_);
        break;
      case StmtKind::FunctionDef:
        out_.insert(s.name);
        bind_params(s.params, out_);
        break;
      case StmtKind::Import:
        for (const auto& a : s.aliases) {
          out_.insert(a.asname.empty() ? a.name.substr(0, a.name.find('.')) : a.asname);
        }
        break;
      case StmtKind::ImportFrom:
        for (const auto& a : s.aliases) {
          if (a.name != "*") out_.insert(a.asname.empty() ? a.name : a.asname);
        }
        break;
      case StmtKind::Other:
        if (s.other == OtherStmtKind::AnnAssign) bind_target(*s.targets[0], out_);
        if (s.other == OtherStmtKind::ClassDef) out_.insert(s.name);
        if (s.other == OtherStmtKind::Global || s.other == OtherStmtKind::Nonlocal) {
          out_.insert(s.names.begin(), s.names.end());
        }
        for (const auto& c : s.clauses) {
          if (!c.name.empty()) out_.insert(c.name);
          if (c.kind == syntax::ClauseKind::With) {
            for (std::size_t i = 1; i < c.exprs.size(); i += 2) {
              if (c.exprs[i]) bind_target(*c.exprs[i], out_);
            }
          }
        }
        break;
      default:
        break;
    }
  }
  void visit_expr(const Expr& e) override { exprs_.visit_expr(e); }

 private:
  std::set<std::string, std::less<>>& out_;
  ExprBindings exprs_;
};

constexpr std::string_view kBuiltins[] = {
    "abs",        "all",       "any",         "ascii",     "bin",        "bool",      "breakpoint",
    "bytearray",  "bytes",     "callable",    "chr",       "classmethod", "compile",  "complex",
    "delattr",    "dict",      "dir",         "divmod",    "enumerate",  "eval",      "exec",
    "filter",     "float",     "format",      "frozenset", "getattr",    "globals",   "hasattr",
    "hash",       "help",      "hex",         "id",        "input",      "int",       "isinstance",
    "issubclass", "iter",      "len",         "list",      "locals",     "map",       "max",
    "memoryview", "min",       "next",        "object",    "oct",        "open",      "ord",
    "pow",        "print",     "property",    "range",     "repr",       "reversed",  "round",
    "set",        "setattr",   "slice",       "sorted",    "staticmethod", "str",     "sum",
    "super",      "tuple",     "type",        "vars",      "zip",        "display",   "Exception",
    "ValueError", "__name__",
};

}  // namespace

bool is_builtin_name(std::string_view name) {
  for (std::string_view b : kBuiltins) {
    if (b == name) return true;
  }
  return false;
}

TermIndex::TermIndex(const syntax::SyntaxTree& tree) {
  scan(tree.statements, true);
  StmtBindings bindings(bound_);
  syntax::walk(tree, bindings);
}

// `in_scope` is false inside function and class bodies: their assignments
// bind locals and attributes, not notebook-level variables.
void TermIndex::scan(const syntax::StmtList& body, bool in_scope) {
  for (const auto& sp : body) {
    const Stmt& s = *sp;
    switch (s.kind) {
      case StmtKind::FunctionDef:
        functions_[s.name] = sp;
        scan(s.body, false);
        break;
      case StmtKind::Assign:
        if (in_scope) {
          for (const auto& t : s.targets) {
            if (t->is(ExprKind::Name)) assignments_[t->text] = s.value;
          }
        }
        break;
      case StmtKind::For:
        scan(s.body, in_scope);
        scan(s.orelse, in_scope);
        break;
      case StmtKind::Other:
        if (s.other == OtherStmtKind::AnnAssign && in_scope && s.value && s.targets[0]->is(ExprKind::Name)) {
          assignments_[s.targets[0]->text] = s.value;
        }
        for (const auto& c : s.clauses) {
          scan(c.body, in_scope && s.other != OtherStmtKind::ClassDef);
        }
        break;
      default:
        break;
    }
  }
}

const Expr* TermIndex::assigned_value(std::string_view term) const {
  auto it = assignments_.find(term);
  return it == assignments_.end() ? nullptr : it->second.get();
}

VariableRoleReport TermIndex::analyze(std::string_view term) const {
  VariableRoleReport r;
  r.term = std::string(term);
  if (auto f = functions_.find(term); f != functions_.end()) {
    r.role = TermRole::FunctionDefinition;
    r.rendered_source = syntax::render_source(*f->second);
    r.message = "Function definition:\n" + *r.rendered_source;
    return r;
  }
  if (const Expr* value = assigned_value(term)) {
    r.rendered_source = syntax::render_source(*value);
    if (value->is(ExprKind::Lambda)) {
      r.role = TermRole::LambdaExpression;
      r.message = "Lambda function:\n" + *r.rendered_source;
    } else {
      r.role = TermRole::VariableAssignment;
      r.message = "'" + r.term + "' is a variable with value: " + *r.rendered_source;
    }
    return r;
  }
  r.role = TermRole::NotFound;
  r.message = "'" + r.term + "' was not found";
  return r;
}

ValueKind TermIndex::classify(const Expr& expr) const {
  switch (expr.kind) {
    case ExprKind::MappingLiteral:
      return ValueKind::DictionaryLiteral;
    case ExprKind::Lambda:
      return ValueKind::LambdaExpression;
    case ExprKind::Name: {
      if (functions_.count(expr.text) != 0) return ValueKind::NamedFunction;
      // One hop only: the name's own assigned value, never a further name.
      if (const Expr* value = assigned_value(expr.text)) {
        if (value->is(ExprKind::MappingLiteral)) return ValueKind::DictionaryLiteral;
        if (value->is(ExprKind::Lambda)) return ValueKind::LambdaExpression;
      }
      return ValueKind::VariableOther;
    }
    default:
      return ValueKind::VariableOther;
  }
}

VariableRoleReport analyze_term(const syntax::SyntaxTree& tree, std::string_view term) {
  return TermIndex(tree).analyze(term);
}

ValueKind classify_value(const Expr& expr, const syntax::SyntaxTree& tree) {
  return TermIndex(tree).classify(expr);
}

}  // namespace nbtrace
