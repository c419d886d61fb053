// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "nbtrace/imports.hpp"
#include "nbtrace/syntax.hpp"

namespace nbtrace {

struct FrameInfo {
  int creation_cell = 0;
  std::optional<std::string> source_dataset;
  int last_modified_cell = 0;
  std::optional<std::string> derived_from;

  bool operator==(const FrameInfo&) const = default;
};

/// Dataframe names known at a point in the notebook. Names are identifiers
/// or rendered subscript targets such as `dfs['train']`.
class FrameState {
 public:
  bool contains(std::string_view name) const { return frames_.count(name) != 0; }
  const FrameInfo* find(std::string_view name) const;

  void create(const std::string& name, FrameInfo info);
  void touch(std::string_view name, int cell);
  void erase(std::string_view name);

  const std::map<std::string, FrameInfo, std::less<>>& frames() const { return frames_; }
  bool empty() const { return frames_.empty(); }

 private:
  std::map<std::string, FrameInfo, std::less<>> frames_;
};

/// Canonical paths whose call result is a new dataframe read from a dataset.
bool is_reader_path(std::string_view canonical);

/// Frame an expression is rooted at: `df`, `df['a'].str`, `df.loc[m, 'b']`
/// all root at `df`. Descends through attribute, subscript and call-receiver
/// positions; an exact rendered match such as `dfs['train']` wins.
std::optional<std::string> root_frame(const syntax::Expr& expr, const FrameState& state);

/// How an expression produces a dataframe, if it does.
struct FrameOrigin {
  bool from_reader = false;
  std::optional<std::string> source_dataset;  // reader's first string argument
  std::optional<std::string> derived_from;    // known frame the value derives from
};

std::optional<FrameOrigin> frame_origin(const syntax::Expr& expr, const FrameState& state, const ImportTable& table);

}  // namespace nbtrace
