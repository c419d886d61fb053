// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include <cctype>
#include <string>

#include "nbtrace/syntax.hpp"

namespace nbtrace::syntax {

namespace {

// Binding strength, loosest first.
enum Prec : int {
  kTuple = 0,
  kYield,
  kTest,
  kOr,
  kAnd,
  kNot,
  kCmp,
  kBor,
  kBxor,
  kBand,
  kShift,
  kArith,
  kTerm,
  kFactor,
  kPower,
  kAwait,
  kAtom,
};

int binop_prec(const std::string& op) {
  if (op == "|") return kBor;
  if (op == "^") return kBxor;
  if (op == "&") return kBand;
  if (op == "<<" || op == ">>") return kShift;
  if (op == "+" || op == "-") return kArith;
  if (op == "**") return kPower;
  return kTerm;
}

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Lambda:
      return kTest;
    case ExprKind::Other:
      switch (e.other) {
        case OtherExprKind::Tuple:
          return e.items.empty() ? kAtom : kTuple;
        case OtherExprKind::Yield:
        case OtherExprKind::YieldFrom:
          return kYield;
        case OtherExprKind::IfExp:
          return kTest;
        case OtherExprKind::BoolOp:
          return e.text == "or" ? kOr : kAnd;
        case OtherExprKind::UnaryOp:
          return e.text == "not" ? kNot : kFactor;
        case OtherExprKind::Compare:
          return kCmp;
        case OtherExprKind::BinOp:
          return binop_prec(e.text);
        case OtherExprKind::Await:
          return kAwait;
        default:
          return kAtom;
      }
    default:
      return kAtom;
  }
}

class Renderer {
 public:
  std::string expr(const Expr& e, int min_prec) {
    std::string body = raw(e);
    if (precedence(e) < min_prec) return "(" + body + ")";
    return body;
  }

  // Statement-level expression: bare tuples and yields are fine here.
  std::string top(const Expr& e) { return expr(e, kTuple); }

  void stmt(const Stmt& s, int indent, std::string& out) {
    std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    for (const auto& d : s.decorators) out += pad + "@" + expr(*d, kTest) + "\n";
    switch (s.kind) {
      case StmtKind::Import: {
        out += pad + "import ";
        aliases(s, out);
        return;
      }
      case StmtKind::ImportFrom: {
        out += pad + "from " + std::string(static_cast<std::size_t>(s.level), '.') + s.name + " import ";
        aliases(s, out);
        return;
      }
      case StmtKind::Assign: {
        out += pad;
        for (const auto& t : s.targets) out += top(*t) + " = ";
        out += top(*s.value);
        return;
      }
      case StmtKind::AugAssign:
        out += pad + top(*s.targets[0]) + " " + s.text + "= " + top(*s.value);
        return;
      case StmtKind::Expr:
        out += pad + top(*s.value);
        return;
      case StmtKind::FunctionDef: {
        out += pad + (s.is_async ? "async def " : "def ") + s.name + "(" + params(s.params) + ")";
        if (s.returns) out += " -> " + expr(*s.returns, kTest);
        out += ":";
        block(s.body, indent + 1, out);
        return;
      }
      case StmtKind::For: {
        out += pad + (s.is_async ? "async for " : "for ") + top(*s.targets[0]) + " in " + top(*s.value) + ":";
        block(s.body, indent + 1, out);
        if (!s.orelse.empty()) {
          out += "\n" + pad + "else:";
          block(s.orelse, indent + 1, out);
        }
        return;
      }
      case StmtKind::Other:
        other_stmt(s, indent, pad, out);
        return;
    }
  }

  std::string params(const std::vector<Param>& ps) {
    std::string out;
    bool first = true;
    for (const auto& p : ps) {
      if (!first) out += ", ";
      first = false;
      switch (p.kind) {
        case Param::Kind::PositionalOnlyMarker:
          out += "/";
          continue;
        case Param::Kind::VarPositional:
          out += "*" + p.name;
          break;
        case Param::Kind::VarKeyword:
          out += "**" + p.name;
          break;
        case Param::Kind::Normal:
          out += p.name;
          break;
      }
      if (p.annotation) out += ": " + expr(*p.annotation, kTest);
      if (p.default_value) {
        out += p.annotation ? " = " : "=";
        out += expr(*p.default_value, kTest);
      }
    }
    return out;
  }

 private:
  void aliases(const Stmt& s, std::string& out) {
    bool first = true;
    for (const auto& a : s.aliases) {
      if (!first) out += ", ";
      first = false;
      out += a.name;
      if (!a.asname.empty()) out += " as " + a.asname;
    }
  }

  void block(const StmtList& body, int indent, std::string& out) {
    for (const auto& st : body) {
      out += "\n";
      stmt(*st, indent, out);
    }
  }

  void other_stmt(const Stmt& s, int indent, const std::string& pad, std::string& out) {
    switch (s.other) {
      case OtherStmtKind::Pass:
        out += pad + "pass";
        return;
      case OtherStmtKind::Break:
        out += pad + "break";
        return;
      case OtherStmtKind::Continue:
        out += pad + "continue";
        return;
      case OtherStmtKind::Return:
        out += pad + "return";
        if (s.value) out += " " + top(*s.value);
        return;
      case OtherStmtKind::Delete: {
        out += pad + "del ";
        bool first = true;
        for (const auto& t : s.targets) {
          if (!first) out += ", ";
          first = false;
          out += expr(*t, kBor);
        }
        return;
      }
      case OtherStmtKind::Global:
      case OtherStmtKind::Nonlocal: {
        out += pad + (s.other == OtherStmtKind::Global ? "global " : "nonlocal ");
        bool first = true;
        for (const auto& n : s.names) {
          if (!first) out += ", ";
          first = false;
          out += n;
        }
        return;
      }
      case OtherStmtKind::Assert:
        out += pad + "assert " + expr(*s.exprs[0], kTest);
        if (s.exprs.size() > 1) out += ", " + expr(*s.exprs[1], kTest);
        return;
      case OtherStmtKind::Raise:
        out += pad + "raise";
        if (!s.exprs.empty()) out += " " + expr(*s.exprs[0], kTest);
        if (s.exprs.size() > 1) out += " from " + expr(*s.exprs[1], kTest);
        return;
      case OtherStmtKind::AnnAssign:
        out += pad + expr(*s.targets[0], kAtom) + ": " + expr(*s.exprs[0], kTest);
        if (s.value) out += " = " + top(*s.value);
        return;
      case OtherStmtKind::If:
      case OtherStmtKind::While:
      case OtherStmtKind::Try:
      case OtherStmtKind::With:
      case OtherStmtKind::ClassDef: {
        bool first = true;
        for (const auto& c : s.clauses) {
          if (!first) out += "\n";
          first = false;
          out += pad;
          if (s.is_async) out += "async ";
          clause_header(c, out);
          out += ":";
          block(c.body, indent + 1, out);
        }
        return;
      }
      case OtherStmtKind::None:
        return;
    }
  }

  void clause_header(const Clause& c, std::string& out) {
    switch (c.kind) {
      case ClauseKind::If:
        out += "if " + expr(*c.exprs[0], kTest);
        return;
      case ClauseKind::Elif:
        out += "elif " + expr(*c.exprs[0], kTest);
        return;
      case ClauseKind::While:
        out += "while " + expr(*c.exprs[0], kTest);
        return;
      case ClauseKind::Else:
        out += "else";
        return;
      case ClauseKind::Try:
        out += "try";
        return;
      case ClauseKind::Finally:
        out += "finally";
        return;
      case ClauseKind::Except:
        out += c.star ? "except*" : "except";
        if (!c.exprs.empty()) out += " " + expr(*c.exprs[0], kTest);
        if (!c.name.empty()) out += " as " + c.name;
        return;
      case ClauseKind::With: {
        out += "with ";
        for (std::size_t i = 0; i + 1 < c.exprs.size(); i += 2) {
          if (i > 0) out += ", ";
          out += expr(*c.exprs[i], kTest);
          if (c.exprs[i + 1]) out += " as " + expr(*c.exprs[i + 1], kBor);
        }
        return;
      }
      case ClauseKind::Class: {
        out += "class " + c.name;
        if (!c.exprs.empty() || !c.keywords.empty()) out += "(" + arguments(c.exprs, c.keywords) + ")";
        return;
      }
    }
  }

  std::string arguments(std::span<const ExprPtr> positional, const std::vector<Keyword>& keywords) {
    std::string out;
    bool first = true;
    for (const auto& a : positional) {
      if (!first) out += ", ";
      first = false;
      out += expr(*a, kTest);
    }
    for (const auto& k : keywords) {
      if (!first) out += ", ";
      first = false;
      if (k.name.empty()) {
        out += "**" + expr(*k.value, kTest);
      } else {
        out += k.name + "=" + expr(*k.value, kTest);
      }
    }
    return out;
  }

  std::string sequence(const std::vector<ExprPtr>& items) {
    std::string out;
    bool first = true;
    for (const auto& i : items) {
      if (!first) out += ", ";
      first = false;
      out += expr(*i, kTest);
    }
    return out;
  }

  std::string comprehensions(const std::vector<Comprehension>& gens) {
    std::string out;
    for (const auto& g : gens) {
      out += g.is_async ? " async for " : " for ";
      out += target(*g.target) + " in " + expr(*g.iter, kOr);
      for (const auto& cond : g.ifs) out += " if " + expr(*cond, kOr);
    }
    return out;
  }

  // `for` targets: bare tuple, elements at bitwise-or strength.
  std::string target(const Expr& e) {
    if (e.is(OtherExprKind::Tuple) && !e.items.empty()) {
      std::string out;
      bool first = true;
      for (const auto& i : e.items) {
        if (!first) out += ", ";
        first = false;
        out += expr(*i, kBor);
      }
      if (e.items.size() == 1) out += ",";
      return out;
    }
    return expr(e, kBor);
  }

  std::string subscript_index(const Expr& e) {
    if (e.is(OtherExprKind::Tuple) && !e.items.empty()) {
      std::string out;
      bool first = true;
      for (const auto& i : e.items) {
        if (!first) out += ", ";
        first = false;
        out += i->is(OtherExprKind::Slice) ? raw(*i) : expr(*i, kTest);
      }
      if (e.items.size() == 1) out += ",";
      return out;
    }
    if (e.is(OtherExprKind::Slice)) return raw(e);
    return expr(e, kTest);
  }

  std::string raw(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Name:
      case ExprKind::Constant:
        return e.text;
      case ExprKind::Attribute: {
        const Expr& v = e.value();
        std::string base = expr(v, kAtom);
        // `1 .real` would otherwise lex as a float.
        if (v.is(ExprKind::Constant) && !v.text.empty() && std::isdigit(static_cast<unsigned char>(v.text[0])) &&
            v.text.find_first_of(".eEjJxXoObB") == std::string::npos) {
          base = "(" + base + ")";
        }
        return base + "." + e.text;
      }
      case ExprKind::Call:
        return expr(e.func(), kAtom) + "(" + call_arguments(e) + ")";
      case ExprKind::Subscript:
        return expr(e.value(), kAtom) + "[" + subscript_index(e.index()) + "]";
      case ExprKind::Lambda: {
        std::string ps = params(e.params);
        return (ps.empty() ? "lambda" : "lambda " + ps) + ": " + expr(*e.items[0], kTest);
      }
      case ExprKind::MappingLiteral: {
        std::string out = "{";
        bool first = true;
        for (const auto& en : e.entries) {
          if (!first) out += ", ";
          first = false;
          if (en.key) {
            out += expr(*en.key, kTest) + ": " + expr(*en.value, kTest);
          } else {
            out += "**" + expr(*en.value, kBor);
          }
        }
        return out + "}";
      }
      case ExprKind::Other:
        return other(e);
    }
    return {};
  }

  std::string call_arguments(const Expr& call) {
    // A lone generator argument keeps its own parentheses from raw().
    return arguments(call.args(), call.keywords);
  }

  std::string other(const Expr& e) {
    switch (e.other) {
      case OtherExprKind::BinOp: {
        int p = binop_prec(e.text);
        if (e.text == "**") {
          return expr(*e.items[0], kAwait) + " ** " + expr(*e.items[1], kFactor);
        }
        return expr(*e.items[0], p) + " " + e.text + " " + expr(*e.items[1], p + 1);
      }
      case OtherExprKind::UnaryOp:
        if (e.text == "not") return "not " + expr(*e.items[0], kNot);
        return e.text + expr(*e.items[0], kFactor);
      case OtherExprKind::BoolOp: {
        int p = e.text == "or" ? kOr : kAnd;
        std::string out;
        bool first = true;
        for (const auto& v : e.items) {
          if (!first) out += " " + e.text + " ";
          first = false;
          out += expr(*v, p + 1);
        }
        return out;
      }
      case OtherExprKind::Compare: {
        std::string out = expr(*e.items[0], kCmp + 1);
        for (std::size_t i = 0; i < e.ops.size(); ++i) {
          out += " " + e.ops[i] + " " + expr(*e.items[i + 1], kCmp + 1);
        }
        return out;
      }
      case OtherExprKind::IfExp:
        return expr(*e.items[0], kOr) + " if " + expr(*e.items[1], kOr) + " else " + expr(*e.items[2], kTest);
      case OtherExprKind::Tuple: {
        if (e.items.empty()) return "()";
        std::string out = sequence(e.items);
        if (e.items.size() == 1) out += ",";
        return out;
      }
      case OtherExprKind::List:
        return "[" + sequence(e.items) + "]";
      case OtherExprKind::Set:
        return "{" + sequence(e.items) + "}";
      case OtherExprKind::ListComp:
        return "[" + expr(*e.items[0], kTest) + comprehensions(e.generators) + "]";
      case OtherExprKind::SetComp:
        return "{" + expr(*e.items[0], kTest) + comprehensions(e.generators) + "}";
      case OtherExprKind::GeneratorExp:
        return "(" + expr(*e.items[0], kTest) + comprehensions(e.generators) + ")";
      case OtherExprKind::DictComp:
        return "{" + expr(*e.items[0], kTest) + ": " + expr(*e.items[1], kTest) + comprehensions(e.generators) + "}";
      case OtherExprKind::Starred:
        return "*" + expr(*e.items[0], kBor);
      case OtherExprKind::NamedExpr:
        return "(" + expr(*e.items[0], kAtom) + " := " + expr(*e.items[1], kTest) + ")";
      case OtherExprKind::Await:
        return "await " + expr(*e.items[0], kAtom);
      case OtherExprKind::Yield:
        return e.items.empty() ? "yield" : "yield " + top(*e.items[0]);
      case OtherExprKind::YieldFrom:
        return "yield from " + expr(*e.items[0], kTest);
      case OtherExprKind::Slice: {
        std::string out;
        if (e.items[0]) out += expr(*e.items[0], kTest);
        out += ":";
        if (e.items[1]) out += expr(*e.items[1], kTest);
        if (e.items[2]) out += ":" + expr(*e.items[2], kTest);
        return out;
      }
      case OtherExprKind::None:
        return {};
    }
    return {};
  }
};

}  // namespace

std::string render_source(const Expr& expr) { return Renderer().top(expr); }

std::string render_source(const Stmt& stmt) {
  std::string out;
  Renderer().stmt(stmt, 0, out);
  return out;
}

std::string render_source(const SyntaxTree& tree) {
  std::string out;
  Renderer r;
  bool first = true;
  for (const auto& s : tree.statements) {
    if (!first) out += "\n";
    first = false;
    r.stmt(*s, 0, out);
  }
  return out;
}

}  // namespace nbtrace::syntax
