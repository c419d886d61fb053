// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

// Abstract syntax for the Python 3 subset found in notebook code cells.
//
// The node set is deliberately small: the kinds the analyses look at get
// their own tag, everything else is an `Other` node that still carries its
// children so traversal and re-rendering stay total.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nbtrace::syntax {

/// 1-based lines, 0-based columns; end is exclusive.
struct Span {
  int line = 0;
  int col = 0;
  int end_line = 0;
  int end_col = 0;
};

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using StmtPtr = std::shared_ptr<const Stmt>;
using StmtList = std::vector<StmtPtr>;

enum class ExprKind : std::uint8_t {
  Call,
  Attribute,
  Name,
  Subscript,
  Lambda,
  MappingLiteral,
  Constant,
  Other,
};

enum class OtherExprKind : std::uint8_t {
  None,
  BinOp,
  UnaryOp,
  BoolOp,
  Compare,
  IfExp,
  Tuple,
  List,
  Set,
  ListComp,
  SetComp,
  GeneratorExp,
  DictComp,
  Starred,
  NamedExpr,
  Await,
  Yield,
  YieldFrom,
  Slice,
};

/// Keyword argument; an empty name means `**value`.
struct Keyword {
  std::string name;
  ExprPtr value;
};

/// Mapping literal entry; a null key means `**value`.
struct MappingEntry {
  ExprPtr key;
  ExprPtr value;
};

struct Comprehension {
  ExprPtr target;
  ExprPtr iter;
  std::vector<ExprPtr> ifs;
  bool is_async = false;
};

struct Param {
  enum class Kind : std::uint8_t {
    Normal,         // name [: annotation] [= default]
    VarPositional,  // *name, or a bare `*` when name is empty
    VarKeyword,     // **name
    PositionalOnlyMarker,  // /
  };
  Kind kind = Kind::Normal;
  std::string name;
  ExprPtr annotation;
  ExprPtr default_value;
};

// Operand layout in `items` per kind:
//   Call        [func, positional...]          + keywords
//   Attribute   [value]                        text = attribute name
//   Name        []                             text = identifier
//   Subscript   [value, index]
//   Lambda      [body]                         + params
//   Constant    []                             text = literal as written
//   MappingLiteral                             entries
//   Other/BinOp [left, right]                  text = operator
//   Other/UnaryOp [operand]                    text = operator
//   Other/BoolOp  [values...]                  text = "and" | "or"
//   Other/Compare [left, comparators...]       ops
//   Other/IfExp   [body, test, orelse]
//   Other/Tuple, List, Set [elements...]
//   Other/ListComp, SetComp, GeneratorExp [elt] + generators
//   Other/DictComp [key, value]                + generators
//   Other/Starred, Await, YieldFrom [value]
//   Other/Yield   [] or [value]
//   Other/NamedExpr [target, value]
//   Other/Slice   [lower, upper, step]         entries may be null
struct Expr {
  ExprKind kind = ExprKind::Other;
  OtherExprKind other = OtherExprKind::None;
  Span span;
  std::string text;
  std::vector<std::string> ops;
  std::vector<ExprPtr> items;
  std::vector<Keyword> keywords;
  std::vector<MappingEntry> entries;
  std::vector<Param> params;
  std::vector<Comprehension> generators;

  bool is(ExprKind k) const { return kind == k; }
  bool is(OtherExprKind k) const { return kind == ExprKind::Other && other == k; }

  const Expr& func() const { return *items.at(0); }
  std::span<const ExprPtr> args() const {
    return items.empty() ? std::span<const ExprPtr>{}
                         : std::span<const ExprPtr>(items).subspan(1);
  }
  const Expr& value() const { return *items.at(0); }
  const Expr& index() const { return *items.at(1); }
};

enum class StmtKind : std::uint8_t {
  Import,
  ImportFrom,
  Assign,
  AugAssign,
  Expr,
  FunctionDef,
  For,
  Other,
};

enum class OtherStmtKind : std::uint8_t {
  None,
  If,
  While,
  Try,
  With,
  ClassDef,
  Return,
  Pass,
  Break,
  Continue,
  Delete,
  Global,
  Nonlocal,
  Assert,
  Raise,
  AnnAssign,
};

struct Alias {
  std::string name;    // dotted module path, or the imported member for `from`
  std::string asname;  // empty when absent
};

enum class ClauseKind : std::uint8_t {
  If,
  Elif,
  Else,
  While,
  Try,
  Except,
  Finally,
  With,
  Class,
};

// A header-plus-block piece of a compound statement.
//   If/Elif/While  exprs = [test]
//   Except         exprs = [] or [type]; name = bound name; star for except*
//   With           exprs = [context, target-or-null, context, target-or-null, ...]
//   Class          exprs = bases; keywords = class keywords; name = class name
struct Clause {
  ClauseKind kind = ClauseKind::Else;
  std::vector<ExprPtr> exprs;
  std::vector<Keyword> keywords;
  std::string name;
  bool star = false;
  StmtList body;
};

// Field use per kind:
//   Import / ImportFrom  aliases; ImportFrom: name = module, level = leading dots
//   Assign               targets (chained `a = b = v`), value
//   AugAssign            targets[0], text = operator without '=', value
//   Expr                 value
//   FunctionDef          name, params, returns, decorators, body, is_async
//   For                  targets[0], value = iterable, body, orelse, is_async
//   Other/Return         value (nullable)
//   Other/Delete         targets
//   Other/Global, Nonlocal names
//   Other/Assert         exprs = [test] or [test, msg]
//   Other/Raise          exprs = [] | [exc] | [exc, cause]
//   Other/AnnAssign      targets[0], exprs = [annotation], value (nullable)
//   Other/If, While, Try, With, ClassDef  clauses (+ decorators, is_async)
struct Stmt {
  StmtKind kind = StmtKind::Other;
  OtherStmtKind other = OtherStmtKind::None;
  Span span;
  std::string name;
  std::string text;
  int level = 0;
  bool is_async = false;
  std::vector<Alias> aliases;
  std::vector<ExprPtr> targets;
  ExprPtr value;
  std::vector<ExprPtr> exprs;
  std::vector<Param> params;
  ExprPtr returns;
  std::vector<ExprPtr> decorators;
  StmtList body;
  StmtList orelse;
  std::vector<Clause> clauses;
  std::vector<std::string> names;

  bool is(StmtKind k) const { return kind == k; }
  bool is(OtherStmtKind k) const { return kind == StmtKind::Other && other == k; }
};

struct SyntaxTree {
  StmtList statements;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, int column, const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  int column_;
  std::string detail_;
};

/// Parses a whole cell. Throws SyntaxError on anything outside Python 3.
SyntaxTree parse_module(std::string_view source);

/// Parses a single expression (used by tests and by trace re-reading).
ExprPtr parse_expression(std::string_view source);

/// Canonical source for a node. Statements render without a trailing
/// newline; nested blocks are indented by four spaces.
std::string render_source(const Expr& expr);
std::string render_source(const Stmt& stmt);
std::string render_source(const SyntaxTree& tree);

/// Structural equality; spans and redundant parentheses are ignored.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const SyntaxTree& a, const SyntaxTree& b);

/// Pre-order, document-order traversal hooks. Every node is offered to
/// exactly one of the two callbacks, exactly once.
class Visitor {
 public:
  virtual ~Visitor() = default;
  virtual void visit_stmt(const Stmt&) {}
  virtual void visit_expr(const Expr&) {}
};

void walk(const SyntaxTree& tree, Visitor& visitor);
void walk(const Stmt& stmt, Visitor& visitor);
void walk(const Expr& expr, Visitor& visitor);

/// Dotted path of an attribute chain rooted at a name ("pd.read_csv"),
/// or empty when the expression is not such a chain.
std::string dotted_name(const Expr& expr);

/// Value of a plain (non f-, non bytes) string literal, if the constant is one.
bool string_literal_value(const Expr& expr, std::string& out);

}  // namespace nbtrace::syntax
