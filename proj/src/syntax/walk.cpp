// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/syntax.hpp"

namespace nbtrace::syntax {

namespace {

void walk_params(const std::vector<Param>& params, Visitor& v) {
  for (const auto& p : params) {
    if (p.annotation) walk(*p.annotation, v);
    if (p.default_value) walk(*p.default_value, v);
  }
}

void walk_keywords(const std::vector<Keyword>& keywords, Visitor& v) {
  for (const auto& k : keywords) walk(*k.value, v);
}

void walk_body(const StmtList& body, Visitor& v) {
  for (const auto& s : body) walk(*s, v);
}

bool eq(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool eq(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!eq(a[i], b[i])) return false;
  }
  return true;
}

bool eq(const std::vector<Keyword>& a, const std::vector<Keyword>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !eq(a[i].value, b[i].value)) return false;
  }
  return true;
}

bool eq(const std::vector<Param>& a, const std::vector<Param>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind || a[i].name != b[i].name || !eq(a[i].annotation, b[i].annotation) ||
        !eq(a[i].default_value, b[i].default_value)) {
      return false;
    }
  }
  return true;
}

bool eq(const StmtList& a, const StmtList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!structurally_equal(*a[i], *b[i])) return false;
  }
  return true;
}

}  // namespace

void walk(const SyntaxTree& tree, Visitor& visitor) { walk_body(tree.statements, visitor); }

void walk(const Stmt& stmt, Visitor& v) {
  v.visit_stmt(stmt);
  for (const auto& d : stmt.decorators) walk(*d, v);
  walk_params(stmt.params, v);
  if (stmt.returns) walk(*stmt.returns, v);
  for (const auto& t : stmt.targets) walk(*t, v);
  if (stmt.kind == StmtKind::Other && stmt.other == OtherStmtKind::AnnAssign) {
    for (const auto& e : stmt.exprs) walk(*e, v);
    if (stmt.value) walk(*stmt.value, v);
  } else {
    if (stmt.value) walk(*stmt.value, v);
    for (const auto& e : stmt.exprs) walk(*e, v);
  }
  for (const auto& c : stmt.clauses) {
    for (const auto& e : c.exprs) {
      if (e) walk(*e, v);
    }
    walk_keywords(c.keywords, v);
    walk_body(c.body, v);
  }
  walk_body(stmt.body, v);
  walk_body(stmt.orelse, v);
}

void walk(const Expr& expr, Visitor& v) {
  v.visit_expr(expr);
  if (expr.kind == ExprKind::Lambda) {
    walk_params(expr.params, v);
    walk(*expr.items[0], v);
    return;
  }
  for (const auto& e : expr.items) {
    if (e) walk(*e, v);
  }
  walk_keywords(expr.keywords, v);
  for (const auto& en : expr.entries) {
    if (en.key) walk(*en.key, v);
    walk(*en.value, v);
  }
  for (const auto& g : expr.generators) {
    walk(*g.target, v);
    walk(*g.iter, v);
    for (const auto& c : g.ifs) walk(*c, v);
  }
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.other != b.other || a.text != b.text || a.ops != b.ops) return false;
  if (!eq(a.items, b.items) || !eq(a.keywords, b.keywords) || !eq(a.params, b.params)) return false;
  if (a.entries.size() != b.entries.size() || a.generators.size() != b.generators.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (!eq(a.entries[i].key, b.entries[i].key) || !eq(a.entries[i].value, b.entries[i].value)) return false;
  }
  for (std::size_t i = 0; i < a.generators.size(); ++i) {
    const auto& ga = a.generators[i];
    const auto& gb = b.generators[i];
    if (ga.is_async != gb.is_async || !eq(ga.target, gb.target) || !eq(ga.iter, gb.iter) || !eq(ga.ifs, gb.ifs)) {
      return false;
    }
  }
  return true;
}

bool structurally_equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.other != b.other || a.name != b.name || a.text != b.text || a.level != b.level ||
      a.is_async != b.is_async || a.names != b.names) {
    return false;
  }
  if (a.aliases.size() != b.aliases.size()) return false;
  for (std::size_t i = 0; i < a.aliases.size(); ++i) {
    if (a.aliases[i].name != b.aliases[i].name || a.aliases[i].asname != b.aliases[i].asname) return false;
  }
  if (!eq(a.targets, b.targets) || !eq(a.value, b.value) || !eq(a.exprs, b.exprs) || !eq(a.params, b.params) ||
      !eq(a.returns, b.returns) || !eq(a.decorators, b.decorators) || !eq(a.body, b.body) ||
      !eq(a.orelse, b.orelse)) {
    return false;
  }
  if (a.clauses.size() != b.clauses.size()) return false;
  for (std::size_t i = 0; i < a.clauses.size(); ++i) {
    const auto& ca = a.clauses[i];
    const auto& cb = b.clauses[i];
    if (ca.kind != cb.kind || ca.name != cb.name || ca.star != cb.star || !eq(ca.exprs, cb.exprs) ||
        !eq(ca.keywords, cb.keywords) || !eq(ca.body, cb.body)) {
      return false;
    }
  }
  return true;
}

bool structurally_equal(const SyntaxTree& a, const SyntaxTree& b) { return eq(a.statements, b.statements); }

}  // namespace nbtrace::syntax
