// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

// Static dataframe lineage: which statements read, write or create frames,
// and the trace records they produce.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nbtrace/diagnostics.hpp"
#include "nbtrace/frames.hpp"
#include "nbtrace/imports.hpp"
#include "nbtrace/notebook.hpp"
#include "nbtrace/ops.hpp"
#include "nbtrace/syntax.hpp"
#include "nbtrace/var_roles.hpp"

namespace nbtrace {

struct VariableDescriptor {
  ValueKind role = ValueKind::VariableOther;
  std::optional<std::string> source;

  bool operator==(const VariableDescriptor&) const = default;
};

struct SnippetRecord {
  std::string operation_type;
  std::optional<std::string> new_df;
  std::optional<std::string> prev_df;
  std::string code;
  std::map<std::string, VariableDescriptor> required_variables;
  std::map<std::string, std::string> imports;
  int snippet_cell_number = 0;
  // Position of the statement within its cell (nested statements included).
  // Orders records; not serialized.
  int statement_index = 0;

  bool operator==(const SnippetRecord&) const = default;
};

struct NotebookTrace {
  std::string notebook_ref;
  std::optional<std::string> dataset_ref;
  std::vector<SnippetRecord> records;
  Diagnostics diagnostics;
};

/// Frame names in document order of first occurrence, without duplicates.
struct FrameRefs {
  std::vector<std::string> reads;
  std::vector<std::string> writes;
};

/// Registers frames created by `stmt` and bumps the modification cell of
/// frames it writes. A known frame rebound to a non-frame value is dropped.
void seed_frames(const syntax::Stmt& stmt, const ImportTable& table, FrameState& state, int cell);

/// Reads are known frames in value position. Writes are known frames in
/// target position (plain, subscript or attribute targets), frames receiving
/// an `inplace=True` call, and, when `table` is given, targets newly bound to
/// a frame-producing value.
FrameRefs detect_frame_refs(const syntax::Stmt& stmt, const FrameState& state, const ImportTable* table = nullptr);

/// Analyzes statements of one notebook in document order.
class StatementAnalyzer {
 public:
  StatementAnalyzer(const TermIndex& terms, std::string notebook_ref, Diagnostics& diagnostics);

  /// Zero or one record for a simple statement; compound statements recurse
  /// into their bodies. Function and class bodies are skipped.
  std::vector<SnippetRecord> analyze(const syntax::Stmt& stmt, FrameState& state, const ImportTable& table, int cell);

  /// Resets the per-cell statement counter.
  void begin_cell() { statement_counter_ = 0; }

 private:
  void analyze_into(const syntax::Stmt& stmt, FrameState& state, const ImportTable& table, int cell, int loop_depth,
                    std::vector<SnippetRecord>& out);
  void analyze_body(const syntax::StmtList& body, FrameState& state, const ImportTable& table, int cell,
                    int loop_depth, std::vector<SnippetRecord>& out);
  std::optional<SnippetRecord> analyze_simple(const syntax::Stmt& stmt, FrameState& state, const ImportTable& table,
                                              int cell);
  void adopt_implicit_frames(const syntax::Stmt& stmt, FrameState& state, const ImportTable& table, int cell) const;
  void note(int cell, const char* category, std::string message);

  const TermIndex& terms_;
  std::string notebook_ref_;
  Diagnostics& diagnostics_;
  int statement_counter_ = 0;
};

/// One-shot analysis of a single statement against a prebuilt role index.
std::vector<SnippetRecord> analyze_statement(const syntax::Stmt& stmt, FrameState& state, const ImportTable& table,
                                             int cell, const TermIndex& terms, Diagnostics* diagnostics = nullptr);

/// Converts a whole notebook. Unparseable cells become diagnostics.
NotebookTrace convert_notebook(const NotebookDocument& nb, std::optional<std::string> dataset_ref = std::nullopt);

}  // namespace nbtrace
