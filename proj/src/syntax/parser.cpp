// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include <set>
#include <string>
#include <utility>

#include "lexer.hpp"
#include "nbtrace/syntax.hpp"

namespace nbtrace::syntax {

SyntaxError::SyntaxError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

namespace {

using detail::Token;
using detail::TokenType;

const std::set<std::string, std::less<>> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",  "await",
    "break", "class",  "continue", "def",     "del",      "elif",   "else",   "except",
    "finally", "for",  "from",    "global",   "if",       "import", "in",     "is",
    "lambda", "nonlocal", "not",  "or",       "pass",     "raise",  "return", "try",
    "while", "with",   "yield",
};

const std::set<std::string, std::less<>> kAugOps = {
    "+=", "-=", "*=", "/=", "//=", "%=", "**=", ">>=", "<<=", "&=", "|=", "^=", "@=",
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  SyntaxTree parse_file() {
    SyntaxTree tree;
    while (!at(TokenType::EndMarker)) {
      if (at(TokenType::Newline)) {
        advance();
        continue;
      }
      parse_statement(tree.statements);
    }
    return tree;
  }

  ExprPtr parse_single_expression() {
    while (at(TokenType::Newline)) advance();
    ExprPtr e = parse_star_expressions();
    while (at(TokenType::Newline)) advance();
    if (!at(TokenType::EndMarker)) fail_here("unexpected trailing input");
    return e;
  }

 private:
  // ---------------------------------------------------------------- tokens

  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(TokenType t) const { return cur().type == t; }
  bool at_op(std::string_view op) const { return cur().type == TokenType::Op && cur().text == op; }
  bool at_kw(std::string_view kw) const { return cur().type == TokenType::Name && cur().text == kw; }

  const Token& advance() {
    const Token& t = toks_[pos_];
    last_end_line_ = t.end_line;
    last_end_col_ = t.end_col;
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail_here(const std::string& message) const {
    throw SyntaxError(cur().line, cur().col, message);
  }

  void expect_op(std::string_view op) {
    if (!at_op(op)) fail_here("expected '" + std::string(op) + "'");
    advance();
  }

  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail_here("expected '" + std::string(kw) + "'");
    advance();
  }

  std::string expect_name() {
    if (!at(TokenType::Name) || kKeywords.count(cur().text) != 0) fail_here("expected identifier");
    return advance().text;
  }

  bool accept_op(std::string_view op) {
    if (at_op(op)) {
      advance();
      return true;
    }
    return false;
  }

  bool accept_kw(std::string_view kw) {
    if (at_kw(kw)) {
      advance();
      return true;
    }
    return false;
  }

  Span begin_span() const { return Span{cur().line, cur().col, 0, 0}; }
  void finish(Span& s) const {
    s.end_line = last_end_line_;
    s.end_col = last_end_col_;
  }

  // ---------------------------------------------------------------- nodes

  std::shared_ptr<Expr> new_expr(ExprKind kind, Span start) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->span = start;
    finish(e->span);
    return e;
  }

  std::shared_ptr<Expr> new_other(OtherExprKind kind, Span start) {
    auto e = new_expr(ExprKind::Other, start);
    e->other = kind;
    return e;
  }

  std::shared_ptr<Stmt> new_stmt(StmtKind kind, Span start) {
    auto s = std::make_shared<Stmt>();
    s->kind = kind;
    s->span = start;
    finish(s->span);
    return s;
  }

  std::shared_ptr<Stmt> new_other_stmt(OtherStmtKind kind, Span start) {
    auto s = new_stmt(StmtKind::Other, start);
    s->other = kind;
    return s;
  }

  // ------------------------------------------------------------ statements

  void parse_statement(StmtList& out) {
    if (at(TokenType::Indent)) fail_here("unexpected indent");
    if (at(TokenType::Dedent)) fail_here("unexpected dedent");
    if (at_op("@")) {
      out.push_back(parse_decorated());
      return;
    }
    if (at(TokenType::Name)) {
      const std::string& w = cur().text;
      if (w == "def") {
        out.push_back(parse_funcdef(begin_span(), {}, false));
        return;
      }
      if (w == "class") {
        out.push_back(parse_classdef(begin_span(), {}));
        return;
      }
      if (w == "if") {
        out.push_back(parse_if());
        return;
      }
      if (w == "while") {
        out.push_back(parse_while());
        return;
      }
      if (w == "for") {
        out.push_back(parse_for(begin_span(), false));
        return;
      }
      if (w == "try") {
        out.push_back(parse_try());
        return;
      }
      if (w == "with") {
        out.push_back(parse_with(begin_span(), false));
        return;
      }
      if (w == "async") {
        Span start = begin_span();
        const Token& next = ahead(1);
        if (next.type == TokenType::Name && next.text == "def") {
          advance();
          out.push_back(parse_funcdef(start, {}, true));
          return;
        }
        if (next.type == TokenType::Name && next.text == "for") {
          advance();
          out.push_back(parse_for(start, true));
          return;
        }
        if (next.type == TokenType::Name && next.text == "with") {
          advance();
          out.push_back(parse_with(start, true));
          return;
        }
      }
    }
    parse_simple_statements(out);
  }

  void parse_simple_statements(StmtList& out) {
    out.push_back(parse_simple_statement());
    while (accept_op(";")) {
      if (at(TokenType::Newline)) break;
      out.push_back(parse_simple_statement());
    }
    if (!at(TokenType::Newline)) fail_here("invalid syntax");
    advance();
  }

  StmtList parse_block() {
    expect_op(":");
    StmtList body;
    if (!at(TokenType::Newline)) {
      parse_simple_statements(body);
      return body;
    }
    advance();
    if (!at(TokenType::Indent)) fail_here("expected an indented block");
    advance();
    while (!at(TokenType::Dedent) && !at(TokenType::EndMarker)) {
      if (at(TokenType::Newline)) {
        advance();
        continue;
      }
      parse_statement(body);
    }
    if (at(TokenType::Dedent)) advance();
    return body;
  }

  StmtPtr parse_simple_statement() {
    Span start = begin_span();
    if (at(TokenType::Name)) {
      const std::string w = cur().text;
      if (w == "import") return parse_import(start);
      if (w == "from") return parse_from_import(start);
      if (w == "pass" || w == "break" || w == "continue") {
        advance();
        return new_other_stmt(w == "pass"    ? OtherStmtKind::Pass
                              : w == "break" ? OtherStmtKind::Break
                                             : OtherStmtKind::Continue,
                              start);
      }
      if (w == "return") {
        advance();
        ExprPtr value;
        if (!at_simple_end()) value = parse_star_expressions();
        auto s = new_other_stmt(OtherStmtKind::Return, start);
        s->value = value;
        return s;
      }
      if (w == "del") {
        advance();
        std::vector<ExprPtr> targets;
        targets.push_back(parse_target_expr());
        while (accept_op(",")) {
          if (at_simple_end()) break;
          targets.push_back(parse_target_expr());
        }
        auto s = new_other_stmt(OtherStmtKind::Delete, start);
        s->targets = std::move(targets);
        return s;
      }
      if (w == "global" || w == "nonlocal") {
        advance();
        std::vector<std::string> names{expect_name()};
        while (accept_op(",")) names.push_back(expect_name());
        auto s = new_other_stmt(w == "global" ? OtherStmtKind::Global : OtherStmtKind::Nonlocal, start);
        s->names = std::move(names);
        return s;
      }
      if (w == "assert") {
        advance();
        std::vector<ExprPtr> exprs{parse_expression()};
        if (accept_op(",")) exprs.push_back(parse_expression());
        auto s = new_other_stmt(OtherStmtKind::Assert, start);
        s->exprs = std::move(exprs);
        return s;
      }
      if (w == "raise") {
        advance();
        std::vector<ExprPtr> exprs;
        if (!at_simple_end()) {
          exprs.push_back(parse_expression());
          if (accept_kw("from")) exprs.push_back(parse_expression());
        }
        auto s = new_other_stmt(OtherStmtKind::Raise, start);
        s->exprs = std::move(exprs);
        return s;
      }
    }
    return parse_expression_statement(start);
  }

  bool at_simple_end() const { return at(TokenType::Newline) || at_op(";") || at(TokenType::EndMarker); }

  StmtPtr parse_expression_statement(Span start) {
    ExprPtr first = at_kw("yield") ? parse_yield() : parse_star_expressions();
    if (at_op("=")) {
      std::vector<ExprPtr> chain{first};
      while (accept_op("=")) {
        chain.push_back(at_kw("yield") ? parse_yield() : parse_star_expressions());
      }
      ExprPtr value = chain.back();
      chain.pop_back();
      for (const auto& t : chain) check_target(*t, t->span);
      auto s = new_stmt(StmtKind::Assign, start);
      s->targets = std::move(chain);
      s->value = value;
      return s;
    }
    if (cur().type == TokenType::Op && kAugOps.count(cur().text) != 0) {
      if (!(first->is(ExprKind::Name) || first->is(ExprKind::Attribute) || first->is(ExprKind::Subscript))) {
        fail_here("illegal expression for augmented assignment");
      }
      std::string op = advance().text;
      op.pop_back();
      ExprPtr value = at_kw("yield") ? parse_yield() : parse_star_expressions();
      auto s = new_stmt(StmtKind::AugAssign, start);
      s->targets.push_back(first);
      s->text = op;
      s->value = value;
      return s;
    }
    if (at_op(":")) {
      if (!(first->is(ExprKind::Name) || first->is(ExprKind::Attribute) || first->is(ExprKind::Subscript))) {
        fail_here("illegal target for annotation");
      }
      advance();
      ExprPtr annotation = parse_expression();
      ExprPtr value;
      if (accept_op("=")) value = at_kw("yield") ? parse_yield() : parse_star_expressions();
      auto s = new_other_stmt(OtherStmtKind::AnnAssign, start);
      s->targets.push_back(first);
      s->exprs.push_back(annotation);
      s->value = value;
      return s;
    }
    auto s = new_stmt(StmtKind::Expr, start);
    s->value = first;
    return s;
  }

  void check_target(const Expr& e, const Span& where) const {
    switch (e.kind) {
      case ExprKind::Name:
      case ExprKind::Attribute:
      case ExprKind::Subscript:
        return;
      case ExprKind::Other:
        if (e.other == OtherExprKind::Tuple || e.other == OtherExprKind::List) {
          for (const auto& item : e.items) check_target(*item, where);
          return;
        }
        if (e.other == OtherExprKind::Starred) {
          check_target(*e.items[0], where);
          return;
        }
        break;
      default:
        break;
    }
    throw SyntaxError(where.line, where.col, "cannot assign to expression");
  }

  std::string parse_dotted_name() {
    std::string name = expect_name();
    while (accept_op(".")) name += "." + expect_name();
    return name;
  }

  StmtPtr parse_import(Span start) {
    expect_kw("import");
    std::vector<Alias> aliases;
    do {
      Alias a;
      a.name = parse_dotted_name();
      if (accept_kw("as")) a.asname = expect_name();
      aliases.push_back(std::move(a));
    } while (accept_op(","));
    auto s = new_stmt(StmtKind::Import, start);
    s->aliases = std::move(aliases);
    return s;
  }

  StmtPtr parse_from_import(Span start) {
    expect_kw("from");
    int level = 0;
    while (at_op(".") || at_op("...")) {
      level += at_op(".") ? 1 : 3;
      advance();
    }
    std::string module;
    if (!at_kw("import")) module = parse_dotted_name();
    if (level == 0 && module.empty()) fail_here("expected module name");
    expect_kw("import");
    std::vector<Alias> aliases;
    if (accept_op("*")) {
      aliases.push_back(Alias{"*", ""});
    } else {
      bool paren = accept_op("(");
      do {
        if (paren && at_op(")")) break;
        Alias a;
        a.name = expect_name();
        if (accept_kw("as")) a.asname = expect_name();
        aliases.push_back(std::move(a));
      } while (accept_op(","));
      if (paren) expect_op(")");
    }
    auto s = new_stmt(StmtKind::ImportFrom, start);
    s->name = module;
    s->level = level;
    s->aliases = std::move(aliases);
    return s;
  }

  StmtPtr parse_decorated() {
    Span start = begin_span();
    std::vector<ExprPtr> decorators;
    while (accept_op("@")) {
      decorators.push_back(parse_named_expression());
      if (!at(TokenType::Newline)) fail_here("expected newline after decorator");
      advance();
    }
    if (at_kw("def")) return parse_funcdef(start, std::move(decorators), false);
    if (at_kw("class")) return parse_classdef(start, std::move(decorators));
    if (at_kw("async") && ahead(1).type == TokenType::Name && ahead(1).text == "def") {
      advance();
      return parse_funcdef(start, std::move(decorators), true);
    }
    fail_here("expected function or class definition after decorator");
  }

  StmtPtr parse_funcdef(Span start, std::vector<ExprPtr> decorators, bool is_async) {
    expect_kw("def");
    std::string name = expect_name();
    expect_op("(");
    std::vector<Param> params = parse_params(")", true);
    expect_op(")");
    ExprPtr returns;
    if (accept_op("->")) returns = parse_expression();
    StmtList body = parse_block();
    auto s = new_stmt(StmtKind::FunctionDef, start);
    s->name = std::move(name);
    s->params = std::move(params);
    s->returns = returns;
    s->decorators = std::move(decorators);
    s->body = std::move(body);
    s->is_async = is_async;
    return s;
  }

  std::vector<Param> parse_params(std::string_view closer, bool annotations) {
    std::vector<Param> params;
    bool seen_star = false;
    while (!at_op(closer)) {
      Param p;
      if (accept_op("/")) {
        p.kind = Param::Kind::PositionalOnlyMarker;
      } else if (accept_op("**")) {
        p.kind = Param::Kind::VarKeyword;
        p.name = expect_name();
        if (annotations && accept_op(":")) p.annotation = parse_expression();
      } else if (accept_op("*")) {
        if (seen_star) fail_here("duplicate '*' in parameters");
        seen_star = true;
        p.kind = Param::Kind::VarPositional;
        if (!at_op(",") && !at_op(closer)) {
          p.name = expect_name();
          if (annotations && accept_op(":")) p.annotation = parse_expression();
        }
      } else {
        p.name = expect_name();
        if (annotations && accept_op(":")) p.annotation = parse_expression();
        if (accept_op("=")) p.default_value = parse_expression();
      }
      params.push_back(std::move(p));
      if (!accept_op(",")) break;
    }
    return params;
  }

  StmtPtr parse_classdef(Span start, std::vector<ExprPtr> decorators) {
    expect_kw("class");
    Clause clause;
    clause.kind = ClauseKind::Class;
    clause.name = expect_name();
    if (accept_op("(")) {
      parse_call_arguments(clause.exprs, clause.keywords);
      expect_op(")");
    }
    clause.body = parse_block();
    auto s = new_other_stmt(OtherStmtKind::ClassDef, start);
    s->name = clause.name;
    s->decorators = std::move(decorators);
    s->clauses.push_back(std::move(clause));
    return s;
  }

  StmtPtr parse_if() {
    Span start = begin_span();
    std::vector<Clause> clauses;
    expect_kw("if");
    Clause first{ClauseKind::If, {parse_named_expression()}, {}, {}, false, {}};
    first.body = parse_block();
    clauses.push_back(std::move(first));
    while (at_kw("elif")) {
      advance();
      Clause c{ClauseKind::Elif, {parse_named_expression()}, {}, {}, false, {}};
      c.body = parse_block();
      clauses.push_back(std::move(c));
    }
    if (accept_kw("else")) {
      Clause c{ClauseKind::Else, {}, {}, {}, false, {}};
      c.body = parse_block();
      clauses.push_back(std::move(c));
    }
    auto s = new_other_stmt(OtherStmtKind::If, start);
    s->clauses = std::move(clauses);
    return s;
  }

  StmtPtr parse_while() {
    Span start = begin_span();
    expect_kw("while");
    std::vector<Clause> clauses;
    Clause c{ClauseKind::While, {parse_named_expression()}, {}, {}, false, {}};
    c.body = parse_block();
    clauses.push_back(std::move(c));
    if (accept_kw("else")) {
      Clause e{ClauseKind::Else, {}, {}, {}, false, {}};
      e.body = parse_block();
      clauses.push_back(std::move(e));
    }
    auto s = new_other_stmt(OtherStmtKind::While, start);
    s->clauses = std::move(clauses);
    return s;
  }

  StmtPtr parse_for(Span start, bool is_async) {
    expect_kw("for");
    ExprPtr target = parse_target_list();
    expect_kw("in");
    ExprPtr iter = parse_star_expressions();
    StmtList body = parse_block();
    StmtList orelse;
    if (accept_kw("else")) orelse = parse_block();
    auto s = new_stmt(StmtKind::For, start);
    s->targets.push_back(target);
    s->value = iter;
    s->body = std::move(body);
    s->orelse = std::move(orelse);
    s->is_async = is_async;
    return s;
  }

  StmtPtr parse_try() {
    Span start = begin_span();
    expect_kw("try");
    std::vector<Clause> clauses;
    Clause t{ClauseKind::Try, {}, {}, {}, false, {}};
    t.body = parse_block();
    clauses.push_back(std::move(t));
    bool handlers = false;
    while (at_kw("except")) {
      advance();
      handlers = true;
      Clause c{ClauseKind::Except, {}, {}, {}, false, {}};
      if (accept_op("*")) c.star = true;
      if (!at_op(":")) {
        c.exprs.push_back(parse_expression());
        if (accept_kw("as")) c.name = expect_name();
      }
      c.body = parse_block();
      clauses.push_back(std::move(c));
    }
    if (handlers && accept_kw("else")) {
      Clause c{ClauseKind::Else, {}, {}, {}, false, {}};
      c.body = parse_block();
      clauses.push_back(std::move(c));
    }
    bool final_clause = false;
    if (accept_kw("finally")) {
      final_clause = true;
      Clause c{ClauseKind::Finally, {}, {}, {}, false, {}};
      c.body = parse_block();
      clauses.push_back(std::move(c));
    }
    if (!handlers && !final_clause) fail_here("expected 'except' or 'finally' block");
    auto s = new_other_stmt(OtherStmtKind::Try, start);
    s->clauses = std::move(clauses);
    return s;
  }

  StmtPtr parse_with(Span start, bool is_async) {
    expect_kw("with");
    Clause c{ClauseKind::With, {}, {}, {}, false, {}};
    do {
      c.exprs.push_back(parse_expression());
      ExprPtr target;
      if (accept_kw("as")) target = parse_target_expr();
      c.exprs.push_back(target);
    } while (accept_op(","));
    c.body = parse_block();
    auto s = new_other_stmt(OtherStmtKind::With, start);
    s->clauses.push_back(std::move(c));
    s->is_async = is_async;
    return s;
  }

  // ----------------------------------------------------------- expressions

  // Targets in `for` and comprehensions stop before `in`.
  ExprPtr parse_target_expr() {
    Span start = begin_span();
    if (accept_op("*")) {
      ExprPtr inner = parse_bitwise_or();
      auto e = new_other(OtherExprKind::Starred, start);
      e->items.push_back(inner);
      return e;
    }
    return parse_bitwise_or();
  }

  ExprPtr parse_target_list() {
    Span start = begin_span();
    ExprPtr first = parse_target_expr();
    if (!at_op(",")) {
      check_target(*first, first->span);
      return first;
    }
    std::vector<ExprPtr> items{first};
    while (accept_op(",")) {
      if (at_kw("in") || at_op("=")) break;
      items.push_back(parse_target_expr());
    }
    auto e = new_other(OtherExprKind::Tuple, start);
    e->items = std::move(items);
    check_target(*e, e->span);
    return e;
  }

  ExprPtr parse_star_expressions() {
    Span start = begin_span();
    ExprPtr first = parse_star_expression();
    if (!at_op(",")) return first;
    std::vector<ExprPtr> items{first};
    while (accept_op(",")) {
      if (!starts_expression()) break;
      items.push_back(parse_star_expression());
    }
    auto e = new_other(OtherExprKind::Tuple, start);
    e->items = std::move(items);
    return e;
  }

  ExprPtr parse_star_expression() {
    Span start = begin_span();
    if (accept_op("*")) {
      ExprPtr inner = parse_bitwise_or();
      auto e = new_other(OtherExprKind::Starred, start);
      e->items.push_back(inner);
      return e;
    }
    return parse_named_expression();
  }

  bool starts_expression() const {
    const Token& t = cur();
    switch (t.type) {
      case TokenType::Name:
        return kKeywords.count(t.text) == 0 || t.text == "None" || t.text == "True" ||
               t.text == "False" || t.text == "lambda" || t.text == "not" || t.text == "await" ||
               t.text == "yield";
      case TokenType::Number:
      case TokenType::String:
        return true;
      case TokenType::Op:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
               t.text == "~" || t.text == "*" || t.text == "..." || t.text == "**";
      default:
        return false;
    }
  }

  ExprPtr parse_named_expression() {
    if (at(TokenType::Name) && ahead(1).type == TokenType::Op && ahead(1).text == ":=" &&
        kKeywords.count(cur().text) == 0) {
      Span start = begin_span();
      Span name_start = begin_span();
      std::string name = advance().text;
      auto target = new_expr(ExprKind::Name, name_start);
      target->text = name;
      advance();
      ExprPtr value = parse_expression();
      auto e = new_other(OtherExprKind::NamedExpr, start);
      e->items = {target, value};
      return e;
    }
    return parse_expression();
  }

  ExprPtr parse_expression() {
    if (at_kw("lambda")) return parse_lambda();
    Span start = begin_span();
    ExprPtr body = parse_disjunction();
    if (at_kw("if")) {
      advance();
      ExprPtr test = parse_disjunction();
      expect_kw("else");
      ExprPtr orelse = parse_expression();
      auto e = new_other(OtherExprKind::IfExp, start);
      e->items = {body, test, orelse};
      return e;
    }
    return body;
  }

  ExprPtr parse_lambda() {
    Span start = begin_span();
    expect_kw("lambda");
    std::vector<Param> params = parse_params(":", false);
    expect_op(":");
    ExprPtr body = parse_expression();
    auto e = new_expr(ExprKind::Lambda, start);
    e->params = std::move(params);
    e->items.push_back(body);
    return e;
  }

  ExprPtr parse_bool_chain(std::string_view op, ExprPtr (Parser::*next)()) {
    Span start = begin_span();
    ExprPtr first = (this->*next)();
    if (!at_kw(op)) return first;
    std::vector<ExprPtr> values{first};
    while (accept_kw(op)) values.push_back((this->*next)());
    auto e = new_other(OtherExprKind::BoolOp, start);
    e->text = std::string(op);
    e->items = std::move(values);
    return e;
  }

  ExprPtr parse_disjunction() { return parse_bool_chain("or", &Parser::parse_conjunction); }
  ExprPtr parse_conjunction() { return parse_bool_chain("and", &Parser::parse_inversion); }

  ExprPtr parse_inversion() {
    if (at_kw("not")) {
      Span start = begin_span();
      advance();
      ExprPtr operand = parse_inversion();
      auto e = new_other(OtherExprKind::UnaryOp, start);
      e->text = "not";
      e->items.push_back(operand);
      return e;
    }
    return parse_comparison();
  }

  bool at_comparison_op(std::string& op) {
    if (cur().type == TokenType::Op) {
      const std::string& t = cur().text;
      if (t == "==" || t == "!=" || t == "<" || t == "<=" || t == ">" || t == ">=") {
        op = t;
        advance();
        return true;
      }
      return false;
    }
    if (at_kw("in")) {
      advance();
      op = "in";
      return true;
    }
    if (at_kw("not") && ahead(1).type == TokenType::Name && ahead(1).text == "in") {
      advance();
      advance();
      op = "not in";
      return true;
    }
    if (at_kw("is")) {
      advance();
      op = accept_kw("not") ? "is not" : "is";
      return true;
    }
    return false;
  }

  ExprPtr parse_comparison() {
    Span start = begin_span();
    ExprPtr left = parse_bitwise_or();
    std::string op;
    if (!at_comparison_op(op)) return left;
    std::vector<ExprPtr> items{left};
    std::vector<std::string> ops{op};
    items.push_back(parse_bitwise_or());
    while (at_comparison_op(op)) {
      ops.push_back(op);
      items.push_back(parse_bitwise_or());
    }
    auto e = new_other(OtherExprKind::Compare, start);
    e->items = std::move(items);
    e->ops = std::move(ops);
    return e;
  }

  ExprPtr parse_binary(std::initializer_list<std::string_view> ops, ExprPtr (Parser::*next)()) {
    Span start = begin_span();
    ExprPtr left = (this->*next)();
    for (;;) {
      bool matched = false;
      for (std::string_view op : ops) {
        if (at_op(op)) {
          matched = true;
          break;
        }
      }
      if (!matched) return left;
      std::string op = advance().text;
      ExprPtr right = (this->*next)();
      auto e = new_other(OtherExprKind::BinOp, start);
      e->text = op;
      e->items = {left, right};
      left = e;
    }
  }

  ExprPtr parse_bitwise_or() { return parse_binary({"|"}, &Parser::parse_bitwise_xor); }
  ExprPtr parse_bitwise_xor() { return parse_binary({"^"}, &Parser::parse_bitwise_and); }
  ExprPtr parse_bitwise_and() { return parse_binary({"&"}, &Parser::parse_shift); }
  ExprPtr parse_shift() { return parse_binary({"<<", ">>"}, &Parser::parse_sum); }
  ExprPtr parse_sum() { return parse_binary({"+", "-"}, &Parser::parse_term); }
  ExprPtr parse_term() { return parse_binary({"*", "/", "//", "%", "@"}, &Parser::parse_factor); }

  ExprPtr parse_factor() {
    if (at_op("+") || at_op("-") || at_op("~")) {
      Span start = begin_span();
      std::string op = advance().text;
      ExprPtr operand = parse_factor();
      auto e = new_other(OtherExprKind::UnaryOp, start);
      e->text = op;
      e->items.push_back(operand);
      return e;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    Span start = begin_span();
    ExprPtr base = parse_await_primary();
    if (at_op("**")) {
      advance();
      ExprPtr exponent = parse_factor();
      auto e = new_other(OtherExprKind::BinOp, start);
      e->text = "**";
      e->items = {base, exponent};
      return e;
    }
    return base;
  }

  ExprPtr parse_await_primary() {
    if (at_kw("await")) {
      Span start = begin_span();
      advance();
      ExprPtr operand = parse_primary();
      auto e = new_other(OtherExprKind::Await, start);
      e->items.push_back(operand);
      return e;
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    Span start = begin_span();
    ExprPtr e = parse_atom();
    for (;;) {
      if (accept_op(".")) {
        std::string attr = expect_name();
        auto a = new_expr(ExprKind::Attribute, start);
        a->text = std::move(attr);
        a->items.push_back(e);
        e = a;
      } else if (accept_op("(")) {
        auto c = std::make_shared<Expr>();
        c->kind = ExprKind::Call;
        c->items.push_back(e);
        std::vector<ExprPtr> positional;
        parse_call_arguments(positional, c->keywords);
        expect_op(")");
        for (auto& p : positional) c->items.push_back(std::move(p));
        c->span = start;
        finish(c->span);
        e = c;
      } else if (accept_op("[")) {
        ExprPtr index = parse_slices();
        expect_op("]");
        auto s = new_expr(ExprKind::Subscript, start);
        s->items = {e, index};
        e = s;
      } else {
        return e;
      }
    }
  }

  void parse_call_arguments(std::vector<ExprPtr>& positional, std::vector<Keyword>& keywords) {
    while (!at_op(")")) {
      Span start = begin_span();
      if (accept_op("**")) {
        keywords.push_back(Keyword{"", parse_expression()});
      } else if (accept_op("*")) {
        ExprPtr inner = parse_expression();
        auto e = new_other(OtherExprKind::Starred, start);
        e->items.push_back(inner);
        positional.push_back(e);
      } else if (at(TokenType::Name) && ahead(1).type == TokenType::Op && ahead(1).text == "=" &&
                 kKeywords.count(cur().text) == 0) {
        std::string name = advance().text;
        advance();
        keywords.push_back(Keyword{std::move(name), parse_expression()});
      } else {
        ExprPtr arg = parse_named_expression();
        if (at_kw("for") || at_kw("async")) {
          auto g = std::make_shared<Expr>();
          g->kind = ExprKind::Other;
          g->other = OtherExprKind::GeneratorExp;
          g->items.push_back(arg);
          g->generators = parse_comprehension_clauses();
          g->span = start;
          finish(g->span);
          arg = g;
        }
        positional.push_back(arg);
      }
      if (!accept_op(",")) break;
    }
  }

  ExprPtr parse_slices() {
    Span start = begin_span();
    ExprPtr first = parse_slice();
    if (!at_op(",")) return first;
    std::vector<ExprPtr> items{first};
    while (accept_op(",")) {
      if (at_op("]")) break;
      items.push_back(parse_slice());
    }
    auto e = new_other(OtherExprKind::Tuple, start);
    e->items = std::move(items);
    return e;
  }

  ExprPtr parse_slice() {
    Span start = begin_span();
    ExprPtr lower;
    if (!at_op(":")) {
      if (at_op("*")) return parse_star_expression();
      lower = parse_named_expression();
      if (!at_op(":")) return lower;
    }
    advance();  // ':'
    ExprPtr upper;
    ExprPtr step;
    if (!at_op(":") && !at_op("]") && !at_op(",")) upper = parse_expression();
    if (accept_op(":")) {
      if (!at_op("]") && !at_op(",")) step = parse_expression();
    }
    auto e = new_other(OtherExprKind::Slice, start);
    e->items = {lower, upper, step};
    return e;
  }

  std::vector<Comprehension> parse_comprehension_clauses() {
    std::vector<Comprehension> gens;
    while (at_kw("for") || (at_kw("async") && ahead(1).type == TokenType::Name && ahead(1).text == "for")) {
      Comprehension c;
      if (accept_kw("async")) c.is_async = true;
      expect_kw("for");
      c.target = parse_target_list();
      expect_kw("in");
      c.iter = parse_disjunction();
      while (at_kw("if")) {
        advance();
        c.ifs.push_back(parse_disjunction());
      }
      gens.push_back(std::move(c));
    }
    return gens;
  }

  ExprPtr parse_yield() {
    Span start = begin_span();
    expect_kw("yield");
    if (accept_kw("from")) {
      ExprPtr value = parse_expression();
      auto e = new_other(OtherExprKind::YieldFrom, start);
      e->items.push_back(value);
      return e;
    }
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Other;
    e->other = OtherExprKind::Yield;
    if (!at_simple_end() && !at_op(")") && !at_op("=")) e->items.push_back(parse_star_expressions());
    e->span = start;
    finish(e->span);
    return e;
  }

  ExprPtr parse_atom() {
    Span start = begin_span();
    const Token& t = cur();
    switch (t.type) {
      case TokenType::Name: {
        if (t.text == "None" || t.text == "True" || t.text == "False") {
          std::string text = advance().text;
          auto e = new_expr(ExprKind::Constant, start);
          e->text = std::move(text);
          return e;
        }
        if (kKeywords.count(t.text) != 0) fail_here("invalid syntax");
        std::string text = advance().text;
        auto e = new_expr(ExprKind::Name, start);
        e->text = std::move(text);
        return e;
      }
      case TokenType::Number: {
        std::string text = advance().text;
        auto e = new_expr(ExprKind::Constant, start);
        e->text = std::move(text);
        return e;
      }
      case TokenType::String: {
        std::string text = advance().text;
        while (at(TokenType::String)) text += " " + advance().text;
        auto e = new_expr(ExprKind::Constant, start);
        e->text = std::move(text);
        return e;
      }
      case TokenType::Op:
        if (t.text == "...") {
          advance();
          auto e = new_expr(ExprKind::Constant, start);
          e->text = "...";
          return e;
        }
        if (t.text == "(") return parse_paren(start);
        if (t.text == "[") return parse_list(start);
        if (t.text == "{") return parse_brace(start);
        break;
      default:
        break;
    }
    fail_here("invalid syntax");
  }

  ExprPtr parse_paren(Span start) {
    expect_op("(");
    if (accept_op(")")) return new_other(OtherExprKind::Tuple, start);
    if (at_kw("yield")) {
      ExprPtr y = parse_yield();
      expect_op(")");
      return y;
    }
    ExprPtr first = parse_star_expression();
    if (at_kw("for") || at_kw("async")) {
      auto g = std::make_shared<Expr>();
      g->kind = ExprKind::Other;
      g->other = OtherExprKind::GeneratorExp;
      g->items.push_back(first);
      g->generators = parse_comprehension_clauses();
      expect_op(")");
      g->span = start;
      finish(g->span);
      return g;
    }
    if (accept_op(")")) {
      if (first->is(OtherExprKind::Starred)) fail_here("cannot use starred expression here");
      return first;
    }
    std::vector<ExprPtr> items{first};
    while (accept_op(",")) {
      if (at_op(")")) break;
      items.push_back(parse_star_expression());
    }
    expect_op(")");
    auto e = new_other(OtherExprKind::Tuple, start);
    e->items = std::move(items);
    return e;
  }

  ExprPtr parse_list(Span start) {
    expect_op("[");
    if (accept_op("]")) return new_other(OtherExprKind::List, start);
    ExprPtr first = parse_star_expression();
    if (at_kw("for") || at_kw("async")) {
      auto gens = parse_comprehension_clauses();
      expect_op("]");
      auto e = new_other(OtherExprKind::ListComp, start);
      e->items.push_back(first);
      e->generators = std::move(gens);
      return e;
    }
    std::vector<ExprPtr> items{first};
    while (accept_op(",")) {
      if (at_op("]")) break;
      items.push_back(parse_star_expression());
    }
    expect_op("]");
    auto e = new_other(OtherExprKind::List, start);
    e->items = std::move(items);
    return e;
  }

  ExprPtr parse_brace(Span start) {
    expect_op("{");
    if (accept_op("}")) return new_expr(ExprKind::MappingLiteral, start);

    auto parse_entry = [&]() -> MappingEntry {
      if (accept_op("**")) return MappingEntry{nullptr, parse_bitwise_or()};
      ExprPtr key = parse_expression();
      expect_op(":");
      return MappingEntry{key, parse_expression()};
    };

    bool is_dict = at_op("**");
    ExprPtr first;
    MappingEntry first_entry;
    if (is_dict) {
      first_entry = parse_entry();
    } else {
      first = parse_star_expression();
      if (accept_op(":")) {
        is_dict = true;
        first_entry = MappingEntry{first, parse_expression()};
      }
    }

    if (is_dict) {
      if (first_entry.key && (at_kw("for") || at_kw("async"))) {
        auto gens = parse_comprehension_clauses();
        expect_op("}");
        auto e = new_other(OtherExprKind::DictComp, start);
        e->items = {first_entry.key, first_entry.value};
        e->generators = std::move(gens);
        return e;
      }
      std::vector<MappingEntry> entries{first_entry};
      while (accept_op(",")) {
        if (at_op("}")) break;
        entries.push_back(parse_entry());
      }
      expect_op("}");
      auto e = new_expr(ExprKind::MappingLiteral, start);
      e->entries = std::move(entries);
      return e;
    }

    if (at_kw("for") || at_kw("async")) {
      auto gens = parse_comprehension_clauses();
      expect_op("}");
      auto e = new_other(OtherExprKind::SetComp, start);
      e->items.push_back(first);
      e->generators = std::move(gens);
      return e;
    }
    std::vector<ExprPtr> items{first};
    while (accept_op(",")) {
      if (at_op("}")) break;
      items.push_back(parse_star_expression());
    }
    expect_op("}");
    auto e = new_other(OtherExprKind::Set, start);
    e->items = std::move(items);
    return e;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int last_end_line_ = 1;
  int last_end_col_ = 0;
};

}  // namespace

SyntaxTree parse_module(std::string_view source) {
  return Parser(detail::tokenize(source)).parse_file();
}

ExprPtr parse_expression(std::string_view source) {
  return Parser(detail::tokenize(source)).parse_single_expression();
}

std::string dotted_name(const Expr& expr) {
  if (expr.is(ExprKind::Name)) return expr.text;
  if (expr.is(ExprKind::Attribute)) {
    std::string base = dotted_name(expr.value());
    if (base.empty()) return {};
    return base + "." + expr.text;
  }
  return {};
}

bool string_literal_value(const Expr& expr, std::string& out) {
  if (!expr.is(ExprKind::Constant)) return false;
  const std::string& raw = expr.text;
  if (raw.empty()) return false;
  // Concatenated literals are joined with a single space by the parser; only
  // accept a single plain literal here.
  std::size_t i = 0;
  bool is_raw = false;
  while (i < raw.size() && raw[i] != '\'' && raw[i] != '"') {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i])));
    if (c == 'b' || c == 'f') return false;
    if (c == 'r') is_raw = true;
    if (c != 'r' && c != 'u') return false;
    ++i;
  }
  if (i >= raw.size()) return false;
  char q = raw[i];
  std::size_t qlen = (raw.compare(i, 3, std::string(3, q)) == 0 && raw.size() >= i + 6) ? 3 : 1;
  if (raw.size() < i + 2 * qlen) return false;
  std::string_view body(raw.data() + i + qlen, raw.size() - i - 2 * qlen);
  if (raw.compare(raw.size() - qlen, qlen, std::string(qlen, q)) != 0) return false;
  std::string value;
  for (std::size_t k = 0; k < body.size(); ++k) {
    char c = body[k];
    if (c == q && qlen == 1) return false;  // a second literal follows
    if (c == '\\' && k + 1 < body.size()) {
      char n = body[k + 1];
      if (is_raw) {
        value += c;
        value += n;
        ++k;
        continue;
      }
      ++k;
      switch (n) {
        case 'n': value += '\n'; break;
        case 't': value += '\t'; break;
        case 'r': value += '\r'; break;
        case '\\': value += '\\'; break;
        case '\'': value += '\''; break;
        case '"': value += '"'; break;
        case '\n': break;
        default:
          value += '\\';
          value += n;
          break;
      }
      continue;
    }
    value += c;
  }
  out = std::move(value);
  return true;
}

}  // namespace nbtrace::syntax
