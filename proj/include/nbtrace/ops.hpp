// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

// Operation taxonomy for frame-touching statements and transform-argument
// extraction for map/apply calls.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nbtrace/frames.hpp"
#include "nbtrace/imports.hpp"
#include "nbtrace/syntax.hpp"
#include "nbtrace/var_roles.hpp"

namespace nbtrace {

enum class OperationType { None, AsType, Datetime, Apply, Map, Fillna, Read, Drop, Rename, Merge };

/// Output label: "as_type", "datetime", ..., "" for None.
std::string_view label(OperationType op);
std::optional<OperationType> parse_operation_type(std::string_view label);

/// Every label in the closed set, "" last.
const std::vector<OperationType>& all_operation_types();

struct TransformArg {
  std::string source;
  ValueKind kind = ValueKind::VariableOther;

  bool operator==(const TransformArg&) const = default;
};

class MissingArgument : public std::runtime_error {
 public:
  explicit MissingArgument(const std::string& method)
      : std::runtime_error("." + method + "() called without a positional argument") {}
};

struct ResolvedName {
  ValueKind kind = ValueKind::VariableOther;
  std::optional<std::string> source;
};

/// Looks up what a bare name used as a transform argument refers to.
class NameResolver {
 public:
  virtual ~NameResolver() = default;
  virtual std::optional<ResolvedName> resolve(std::string_view name) const = 0;
};

/// Resolves through the role index of a whole notebook.
class TermIndexResolver : public NameResolver {
 public:
  explicit TermIndexResolver(const TermIndex& terms) : terms_(terms) {}
  std::optional<ResolvedName> resolve(std::string_view name) const override;

 private:
  const TermIndex& terms_;
};

/// Value expression a statement computes: assignment right side or the
/// expression of an expression statement. Null for other statements.
const syntax::Expr* statement_value(const syntax::Stmt& stmt);

/// The outermost call of the statement's value, looking through trailing
/// attribute and subscript access (`pd.to_datetime(x).dt.year`).
const syntax::Expr* outermost_call(const syntax::Stmt& stmt);

OperationType classify(const syntax::Stmt& stmt, const FrameState& state, const ImportTable& table);

/// Labelled calls nested in the receiver chain of the outermost call, for
/// instance `fillna` in `df['a'].fillna(0).astype(int)`. Method names, inner
/// first.
std::vector<std::string> inner_labeled_calls(const syntax::Stmt& stmt, const FrameState& state,
                                             const ImportTable& table);

/// First positional argument of the statement's map/apply call. Nullopt when
/// the outermost call is not map/apply/applymap; throws MissingArgument when
/// it has no positional argument.
std::optional<TransformArg> extract_transform_arg(const syntax::Stmt& stmt, const NameResolver& names);

/// Classification of a single argument expression.
TransformArg classify_argument(const syntax::Expr& arg, const NameResolver& names);

}  // namespace nbtrace
