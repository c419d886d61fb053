// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nbtrace/diagnostics.hpp"
#include "nbtrace/lineage.hpp"
#include "nbtrace/ops.hpp"
#include "nbtrace/var_roles.hpp"

namespace nbtrace {

class IOFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON array of records, two-space indent, trailing newline.
std::string serialize_trace(const std::vector<SnippetRecord>& records);
std::vector<SnippetRecord> parse_trace(std::string_view text);

/// `<stem>.trace.json` for a notebook path or API ref.
std::string trace_file_name(std::string_view notebook_ref);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

void write_trace(const NotebookTrace& trace, const std::filesystem::path& file);

/// Resolves transform-argument names from a record's required_variables.
class RecordResolver : public NameResolver {
 public:
  explicit RecordResolver(const SnippetRecord& record) : record_(record) {}
  std::optional<ResolvedName> resolve(std::string_view name) const override;

 private:
  const SnippetRecord& record_;
};

/// Transform argument of a map/apply record, recomputed from its code.
std::optional<TransformArg> record_transform_arg(const SnippetRecord& record);

struct SummaryRow {
  std::string dataset_name;
  std::string notebook_ref;
  int snippet_cell_number = 0;
  std::string operation_type;
  std::optional<std::string> prev_df;
  std::optional<std::string> new_df;
  std::optional<ValueKind> transform_arg_kind;
  std::optional<std::string> transform_arg_source;
  int statement_order = 0;  // record position within its trace

  bool operator==(const SummaryRow&) const = default;
};

struct CorpusStats {
  std::size_t notebooks_processed = 0;
  std::size_t records_total = 0;
  std::map<std::string, std::size_t> counts_by_operation_type;
  std::map<std::string, std::size_t> counts_by_value_kind;
  std::size_t distinct_datasets = 0;

  bool operator==(const CorpusStats&) const = default;
};

struct Summary {
  std::vector<SummaryRow> rows;
  CorpusStats stats;
};

/// Dataset a trace is attributed to in summaries.
std::string dataset_name_of(const NotebookTrace& trace);

Summary summarize(const std::vector<NotebookTrace>& traces);

inline constexpr std::string_view kSummaryHeader =
    "dataset_name,notebook_ref,snippet_cell_number,operation_type,prev_df,new_df,transform_arg_kind,"
    "transform_arg_source";

std::string csv_field(std::string_view value);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string stats_json(const CorpusStats& stats);
std::string diagnostics_jsonl(const Diagnostics& diagnostics);

/// One line of the trace directory manifest (traces/index.json).
struct TraceIndexEntry {
  std::string trace_file;
  std::string notebook_ref;
  std::optional<std::string> dataset_ref;
};

std::string serialize_index(const std::vector<TraceIndexEntry>& entries);
std::vector<TraceIndexEntry> parse_index(std::string_view text);

/// Writes every trace plus traces/index.json under `out_dir/traces`, in
/// (dataset ref, notebook ref) order. Colliding stems get a numeric suffix.
std::vector<TraceIndexEntry> write_traces(const std::vector<NotebookTrace>& traces,
                                          const std::filesystem::path& out_dir);

/// Loads traces written by write_traces. Without an index every
/// `*.trace.json` file is read and named by its stem.
std::vector<NotebookTrace> load_traces(const std::filesystem::path& traces_dir);

/// summary.csv and stats.json under `out_dir`.
Summary write_report(const std::vector<NotebookTrace>& traces, const std::filesystem::path& out_dir);

void write_diagnostics(const Diagnostics& diagnostics, const std::filesystem::path& file);

/// Orders traces by (dataset name, notebook ref).
void sort_traces(std::vector<NotebookTrace>& traces);

}  // namespace nbtrace
