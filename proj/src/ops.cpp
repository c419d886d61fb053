// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/ops.hpp"

namespace nbtrace {

using syntax::Expr;
using syntax::ExprKind;
using syntax::Stmt;
using syntax::StmtKind;

std::string_view label(OperationType op) {
  switch (op) {
    case OperationType::AsType:
      return "as_type";
    case OperationType::Datetime:
      return "datetime";
    case OperationType::Apply:
      return "apply";
    case OperationType::Map:
      return "map";
    case OperationType::Fillna:
      return "fillna";
    case OperationType::Read:
      return "read";
    case OperationType::Drop:
      return "drop";
    case OperationType::Rename:
      return "rename";
    case OperationType::Merge:
      return "merge";
    case OperationType::None:
      return "";
  }
  return "";
}

const std::vector<OperationType>& all_operation_types() {
  static const std::vector<OperationType> all = {
      OperationType::AsType, OperationType::Datetime, OperationType::Apply,  OperationType::Map,
      OperationType::Fillna, OperationType::Read,     OperationType::Drop,   OperationType::Rename,
      OperationType::Merge,  OperationType::None,
  };
  return all;
}

std::optional<OperationType> parse_operation_type(std::string_view text) {
  for (OperationType op : all_operation_types()) {
    if (label(op) == text) return op;
  }
  return std::nullopt;
}

std::optional<ResolvedName> TermIndexResolver::resolve(std::string_view name) const {
  VariableRoleReport report = terms_.analyze(name);
  if (report.role == TermRole::NotFound) return std::nullopt;
  Expr probe;
  probe.kind = ExprKind::Name;
  probe.text = std::string(name);
  return ResolvedName{terms_.classify(probe), report.rendered_source};
}

const Expr* statement_value(const Stmt& stmt) {
  switch (stmt.kind) {
    case StmtKind::Assign:
    case StmtKind::AugAssign:
    case StmtKind::Expr:
      return stmt.value.get();
    case StmtKind::Other:
      if (stmt.other == syntax::OtherStmtKind::AnnAssign || stmt.other == syntax::OtherStmtKind::Return) {
        return stmt.value.get();
      }
      return nullptr;
    default:
      return nullptr;
  }
}

namespace {

const Expr* outermost_call_of(const Expr* e) {
  while (e != nullptr) {
    if (e->is(ExprKind::Call)) return e;
    if (e->is(ExprKind::Attribute) || e->is(ExprKind::Subscript)) {
      e = &e->value();
    } else {
      return nullptr;
    }
  }
  return nullptr;
}

OperationType method_label(std::string_view m) {
  if (m == "astype") return OperationType::AsType;
  if (m == "apply" || m == "applymap") return OperationType::Apply;
  if (m == "map") return OperationType::Map;
  if (m == "fillna") return OperationType::Fillna;
  if (m == "drop") return OperationType::Drop;
  if (m == "rename") return OperationType::Rename;
  if (m == "merge" || m == "join") return OperationType::Merge;
  return OperationType::None;
}

OperationType call_label(const Expr& call, const FrameState& state, const ImportTable& table) {
  const Expr& func = call.func();
  std::string path = canonical_path(func, table);
  if (!path.empty()) {
    if (is_reader_path(path)) return OperationType::Read;
    if (path == "pandas.to_datetime") return OperationType::Datetime;
    if (path == "pandas.merge") return OperationType::Merge;
    return OperationType::None;
  }
  if (func.is(ExprKind::Attribute) && root_frame(func.value(), state)) return method_label(func.text);
  return OperationType::None;
}

bool is_transform_method(const Expr& call) {
  const Expr& func = call.func();
  return func.is(ExprKind::Attribute) && (func.text == "map" || func.text == "apply" || func.text == "applymap");
}

}  // namespace

const Expr* outermost_call(const Stmt& stmt) { return outermost_call_of(statement_value(stmt)); }

OperationType classify(const Stmt& stmt, const FrameState& state, const ImportTable& table) {
  const Expr* call = outermost_call(stmt);
  if (call == nullptr) return OperationType::None;
  return call_label(*call, state, table);
}

std::vector<std::string> inner_labeled_calls(const Stmt& stmt, const FrameState& state, const ImportTable& table) {
  std::vector<std::string> out;
  const Expr* call = outermost_call(stmt);
  if (call == nullptr || !call->func().is(ExprKind::Attribute)) return out;
  const Expr* inner = outermost_call_of(&call->func().value());
  while (inner != nullptr) {
    const Expr& f = inner->func();
    if (call_label(*inner, state, table) != OperationType::None) {
      out.insert(out.begin(), f.is(ExprKind::Attribute) ? f.text : syntax::dotted_name(f));
    }
    if (!f.is(ExprKind::Attribute)) break;
    inner = outermost_call_of(&f.value());
  }
  return out;
}

TransformArg classify_argument(const Expr& arg, const NameResolver& names) {
  TransformArg out;
  out.source = syntax::render_source(arg);
  switch (arg.kind) {
    case ExprKind::MappingLiteral:
      out.kind = ValueKind::DictionaryLiteral;
      break;
    case ExprKind::Lambda:
      out.kind = ValueKind::LambdaExpression;
      break;
    case ExprKind::Name:
      if (auto r = names.resolve(arg.text)) {
        out.kind = r->kind;
        // A resolved function or bound literal reports its definition.
        if (r->kind != ValueKind::VariableOther && r->source) out.source = *r->source;
      }
      break;
    default:
      break;
  }
  return out;
}

std::optional<TransformArg> extract_transform_arg(const Stmt& stmt, const NameResolver& names) {
  const Expr* call = outermost_call(stmt);
  if (call == nullptr || !is_transform_method(*call)) return std::nullopt;
  auto args = call->args();
  if (args.empty()) throw MissingArgument(call->func().text);
  return classify_argument(*args[0], names);
}

}  // namespace nbtrace
