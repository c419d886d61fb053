// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nbtrace {

/// The kernel language whose notebooks the pipeline analyzes.
inline constexpr std::string_view kTargetKernelLanguage = "python";

enum class CellKind { Code, Markdown, Raw, Other };

struct Cell {
  int index = 0;  // position in the notebook's full cells array
  CellKind kind = CellKind::Other;
  std::string source;
};

struct NotebookDocument {
  std::string notebook_ref;
  std::vector<Cell> cells;
  std::string kernel_language;  // lower-cased; empty when the metadata has none
};

struct DroppedLine {
  int line = 0;  // 1-based within the cell
  std::string text;
};

struct SanitizedSource {
  std::string text;
  std::vector<DroppedLine> dropped;
};

class MalformedNotebook : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedKernel : public std::runtime_error {
 public:
  explicit UnsupportedKernel(std::string language)
      : std::runtime_error("unsupported kernel language '" + language + "'"), language_(std::move(language)) {}
  const std::string& language() const { return language_; }

 private:
  std::string language_;
};

/// Parses nbformat v4 JSON. Throws MalformedNotebook or UnsupportedKernel.
NotebookDocument parse_notebook(std::string_view raw, std::string ref);

/// Reads and parses a notebook file; the ref defaults to the path.
NotebookDocument load_notebook(const std::string& path);

std::vector<Cell> extract_code_cells(const NotebookDocument& nb);

/// Removes IPython magic (`%`, `%%`) and shell escape (`!`) lines.
SanitizedSource sanitize_cell(const Cell& cell);

}  // namespace nbtrace
