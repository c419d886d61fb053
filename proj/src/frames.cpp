// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/frames.hpp"

#include <algorithm>

namespace nbtrace {

using syntax::Expr;
using syntax::ExprKind;
using syntax::OtherExprKind;

const FrameInfo* FrameState::find(std::string_view name) const {
  auto it = frames_.find(name);
  return it == frames_.end() ? nullptr : &it->second;
}

void FrameState::create(const std::string& name, FrameInfo info) {
  info.last_modified_cell = std::max(info.last_modified_cell, info.creation_cell);
  frames_[name] = std::move(info);
}

void FrameState::touch(std::string_view name, int cell) {
  auto it = frames_.find(name);
  if (it != frames_.end()) it->second.last_modified_cell = std::max(it->second.last_modified_cell, cell);
}

void FrameState::erase(std::string_view name) {
  auto it = frames_.find(name);
  if (it != frames_.end()) frames_.erase(it);
}

namespace {

constexpr std::string_view kReaders[] = {
    "pandas.read_csv", "pandas.read_excel", "pandas.read_json", "pandas.read_parquet", "pandas.DataFrame",
};

// Methods whose result is a scalar, a python container, or a side effect
// rather than another frame or series.
constexpr std::string_view kNonFrameMethods[] = {
    "all",        "any",         "boxplot",     "count",     "equals",       "first_valid_index",
    "hist",       "idxmax",      "idxmin",      "info",      "item",         "items",
    "iteritems",  "iterrows",    "itertuples",  "keys",      "kurt",         "last_valid_index",
    "max",        "mean",        "median",      "memory_usage", "min",       "nunique",
    "plot",       "prod",        "sem",         "skew",      "std",          "sum",
    "to_csv",     "to_dict",     "to_excel",    "to_json",   "to_list",      "to_markdown",
    "to_numpy",   "to_parquet",  "to_pickle",   "to_sql",    "to_string",    "tolist",
    "unique",     "var",         "get_group",   "__len__",
};

// After one of these the reducers above yield frames again.
constexpr std::string_view kGroupingMethods[] = {"groupby", "resample", "rolling", "expanding", "ewm", "pivot_table"};

template <std::size_t N>
bool contains(const std::string_view (&set)[N], std::string_view v) {
  return std::find(std::begin(set), std::end(set), v) != std::end(set);
}

bool chain_has_grouping(const Expr& e) {
  const Expr* cur = &e;
  while (true) {
    if (cur->is(ExprKind::Call)) {
      const Expr& f = cur->func();
      if (f.is(ExprKind::Attribute) && contains(kGroupingMethods, f.text)) return true;
      cur = &f;
    } else if (cur->is(ExprKind::Attribute) || cur->is(ExprKind::Subscript)) {
      cur = &cur->value();
    } else {
      return false;
    }
  }
}

}  // namespace

bool is_reader_path(std::string_view canonical) { return contains(kReaders, canonical); }

std::optional<std::string> root_frame(const Expr& expr, const FrameState& state) {
  const Expr* cur = &expr;
  while (true) {
    switch (cur->kind) {
      case ExprKind::Name:
        if (state.contains(cur->text)) return cur->text;
        return std::nullopt;
      case ExprKind::Subscript: {
        std::string rendered = syntax::render_source(*cur);
        if (state.contains(rendered)) return rendered;
        cur = &cur->value();
        break;
      }
      case ExprKind::Attribute:
        cur = &cur->value();
        break;
      case ExprKind::Call:
        cur = &cur->func();
        break;
      default:
        return std::nullopt;
    }
  }
}

std::optional<FrameOrigin> frame_origin(const Expr& expr, const FrameState& state, const ImportTable& table) {
  switch (expr.kind) {
    case ExprKind::Name:
      if (state.contains(expr.text)) return FrameOrigin{false, std::nullopt, expr.text};
      return std::nullopt;
    case ExprKind::Subscript: {
      std::string rendered = syntax::render_source(expr);
      if (state.contains(rendered)) return FrameOrigin{false, std::nullopt, rendered};
      const Expr& base = expr.value();
      // df.loc[...] and df.iloc[...] select from df.
      if (base.is(ExprKind::Attribute) && (base.text == "loc" || base.text == "iloc")) {
        return frame_origin(base.value(), state, table);
      }
      return frame_origin(base, state, table);
    }
    case ExprKind::Attribute:
      if (expr.text == "T") return frame_origin(expr.value(), state, table);
      return std::nullopt;
    case ExprKind::Call: {
      const Expr& func = expr.func();
      std::string path = canonical_path(func, table);
      if (!path.empty()) {
        if (is_reader_path(path)) {
          FrameOrigin o;
          o.from_reader = true;
          std::string literal;
          if (!expr.args().empty() && syntax::string_literal_value(*expr.args()[0], literal)) {
            o.source_dataset = literal;
          }
          return o;
        }
        if (path.rfind("pandas.", 0) != 0) return std::nullopt;
        // pandas.concat([a, b]), pandas.merge(a, b), pandas.get_dummies(df): first frame argument.
        for (const auto& a : expr.args()) {
          if (a->is(OtherExprKind::List) || a->is(OtherExprKind::Tuple)) {
            for (const auto& item : a->items) {
              if (auto o = frame_origin(*item, state, table)) return o;
            }
          } else if (auto o = frame_origin(*a, state, table)) {
            return o;
          }
        }
        for (const auto& k : expr.keywords) {
          if (auto o = frame_origin(*k.value, state, table)) return o;
        }
        return std::nullopt;
      }
      if (!func.is(ExprKind::Attribute)) return std::nullopt;
      if (contains(kNonFrameMethods, func.text) && !chain_has_grouping(func.value())) return std::nullopt;
      const Expr& receiver = func.value();
      if (auto o = frame_origin(receiver, state, table)) return o;
      // df['a'].str.lower(), df['d'].dt.year ...
      if (receiver.is(ExprKind::Attribute) &&
          (receiver.text == "str" || receiver.text == "dt" || receiver.text == "cat")) {
        return frame_origin(receiver.value(), state, table);
      }
      // df.groupby('a')['b'].transform(...)
      if (chain_has_grouping(receiver)) {
        if (auto root = root_frame(receiver, state)) return FrameOrigin{false, std::nullopt, *root};
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace nbtrace
