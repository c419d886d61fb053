// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/reporter.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace nbtrace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

ojson optional_text(const std::optional<std::string>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson record_to_json(const SnippetRecord& r) {
  ojson vars = ojson::object();
  for (const auto& [name, d] : r.required_variables) {
    ojson entry = ojson::object();
    entry["role"] = std::string(to_string(d.role));
    entry["source"] = optional_text(d.source);
    vars[name] = std::move(entry);
  }
  ojson imports = ojson::object();
  for (const auto& [alias, module] : r.imports) imports[alias] = module;

  ojson j = ojson::object();
  j["operation_type"] = r.operation_type;
  j["new_df"] = optional_text(r.new_df);
  j["prev_df"] = optional_text(r.prev_df);
  j["code"] = r.code;
  j["required_variables"] = std::move(vars);
  j["imports"] = std::move(imports);
  j["snippet_cell_number"] = r.snippet_cell_number;
  return j;
}

std::optional<std::string> read_optional_text(const ojson& j, const char* key) {
  const ojson& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

std::string dump(const ojson& j) {
  // Invalid UTF-8 in scraped notebooks is replaced rather than aborting the run.
  return j.dump(2, ' ', false, ojson::error_handler_t::replace);
}

}  // namespace

std::string serialize_trace(const std::vector<SnippetRecord>& records) {
  ojson arr = ojson::array();
  for (const auto& r : records) arr.push_back(record_to_json(r));
  return dump(arr) + "\n";
}

std::vector<SnippetRecord> parse_trace(std::string_view text) {
  std::vector<SnippetRecord> out;
  try {
    ojson arr = ojson::parse(text);
    if (!arr.is_array()) throw TraceFormatError("trace is not a JSON array");
    int position = 0;
    for (const auto& j : arr) {
      SnippetRecord r;
      r.operation_type = j.at("operation_type").get<std::string>();
      r.new_df = read_optional_text(j, "new_df");
      r.prev_df = read_optional_text(j, "prev_df");
      r.code = j.at("code").get<std::string>();
      for (const auto& [name, d] : j.at("required_variables").items()) {
        VariableDescriptor desc;
        auto kind = parse_value_kind(d.at("role").get<std::string>());
        if (!kind) throw TraceFormatError("unknown role for '" + name + "'");
        desc.role = *kind;
        desc.source = read_optional_text(d, "source");
        r.required_variables.emplace(name, std::move(desc));
      }
      for (const auto& [alias, module] : j.at("imports").items()) r.imports.emplace(alias, module.get<std::string>());
      r.snippet_cell_number = j.at("snippet_cell_number").get<int>();
      r.statement_index = position++;
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw TraceFormatError(e.what());
  }
  return out;
}

std::string trace_file_name(std::string_view notebook_ref) {
  std::string stem = fs::path(std::string(notebook_ref)).stem().string();
  if (stem.empty()) stem = "notebook";
  return stem + ".trace.json";
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOFailure("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IOFailure("failed writing " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOFailure("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_trace(const NotebookTrace& trace, const fs::path& file) { write_text_file(file, serialize_trace(trace.records)); }

std::optional<ResolvedName> RecordResolver::resolve(std::string_view name) const {
  auto it = record_.required_variables.find(std::string(name));
  if (it == record_.required_variables.end()) return std::nullopt;
  return ResolvedName{it->second.role, it->second.source};
}

std::optional<TransformArg> record_transform_arg(const SnippetRecord& record) {
  if (record.operation_type != "map" && record.operation_type != "apply") return std::nullopt;
  try {
    syntax::SyntaxTree tree = syntax::parse_module(record.code);
    if (tree.statements.size() != 1) return std::nullopt;
    return extract_transform_arg(*tree.statements[0], RecordResolver(record));
  } catch (const syntax::SyntaxError&) {
    return std::nullopt;
  } catch (const MissingArgument&) {
    return std::nullopt;
  }
}

std::string dataset_name_of(const NotebookTrace& trace) {
  if (trace.dataset_ref && !trace.dataset_ref->empty()) return *trace.dataset_ref;
  std::string parent = fs::path(trace.notebook_ref).parent_path().filename().string();
  return parent.empty() ? "local" : parent;
}

void sort_traces(std::vector<NotebookTrace>& traces) {
  std::stable_sort(traces.begin(), traces.end(), [](const NotebookTrace& a, const NotebookTrace& b) {
    return std::forward_as_tuple(dataset_name_of(a), a.notebook_ref) <
           std::forward_as_tuple(dataset_name_of(b), b.notebook_ref);
  });
}

Summary summarize(const std::vector<NotebookTrace>& traces) {
  Summary s;
  for (OperationType op : all_operation_types()) {
    if (op != OperationType::None) s.stats.counts_by_operation_type[std::string(label(op))] = 0;
  }
  for (ValueKind k : {ValueKind::DictionaryLiteral, ValueKind::NamedFunction, ValueKind::LambdaExpression,
                      ValueKind::VariableOther}) {
    s.stats.counts_by_value_kind[std::string(to_string(k))] = 0;
  }
  std::set<std::string> datasets;
  for (const auto& trace : traces) {
    ++s.stats.notebooks_processed;
    std::string dataset = dataset_name_of(trace);
    datasets.insert(dataset);
    int order = 0;
    for (const auto& r : trace.records) {
      ++s.stats.records_total;
      int position = order++;
      if (r.operation_type.empty()) continue;
      SummaryRow row;
      row.dataset_name = dataset;
      row.notebook_ref = trace.notebook_ref;
      row.snippet_cell_number = r.snippet_cell_number;
      row.operation_type = r.operation_type;
      row.prev_df = r.prev_df;
      row.new_df = r.new_df;
      row.statement_order = position;
      if (auto arg = record_transform_arg(r)) {
        row.transform_arg_kind = arg->kind;
        row.transform_arg_source = arg->source;
        ++s.stats.counts_by_value_kind[std::string(to_string(arg->kind))];
      }
      ++s.stats.counts_by_operation_type[r.operation_type];
      s.rows.push_back(std::move(row));
    }
  }
  s.stats.distinct_datasets = datasets.size();
  std::stable_sort(s.rows.begin(), s.rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return std::tie(a.dataset_name, a.notebook_ref, a.snippet_cell_number, a.statement_order) <
           std::tie(b.dataset_name, b.notebook_ref, b.snippet_cell_number, b.statement_order);
  });
  return s;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out(kSummaryHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += csv_field(r.dataset_name) + ',' + csv_field(r.notebook_ref) + ',' + std::to_string(r.snippet_cell_number) +
           ',' + csv_field(r.operation_type) + ',' + csv_field(r.prev_df.value_or("")) + ',' +
           csv_field(r.new_df.value_or("")) + ',' +
           (r.transform_arg_kind ? std::string(to_string(*r.transform_arg_kind)) : std::string()) + ',' +
           csv_field(r.transform_arg_source.value_or("")) + '\n';
  }
  return out;
}

std::string stats_json(const CorpusStats& stats) {
  ojson j = ojson::object();
  j["notebooks_processed"] = stats.notebooks_processed;
  j["records_total"] = stats.records_total;
  ojson ops = ojson::object();
  for (OperationType op : all_operation_types()) {
    std::string l(label(op));
    if (auto it = stats.counts_by_operation_type.find(l); it != stats.counts_by_operation_type.end()) {
      ops[l] = it->second;
    }
  }
  j["counts_by_operation_type"] = std::move(ops);
  ojson kinds = ojson::object();
  for (const auto& [k, n] : stats.counts_by_value_kind) kinds[k] = n;
  j["counts_by_value_kind"] = std::move(kinds);
  j["distinct_datasets"] = stats.distinct_datasets;
  return dump(j) + "\n";
}

std::string diagnostics_jsonl(const Diagnostics& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    ojson j = ojson::object();
    j["notebook_ref"] = d.notebook_ref;
    j["cell"] = d.cell ? ojson(*d.cell) : ojson(nullptr);
    j["category"] = d.category;
    j["message"] = d.message;
    out += j.dump(-1, ' ', false, ojson::error_handler_t::replace) + "\n";
  }
  return out;
}

std::string serialize_index(const std::vector<TraceIndexEntry>& entries) {
  ojson arr = ojson::array();
  for (const auto& e : entries) {
    ojson j = ojson::object();
    j["trace"] = e.trace_file;
    j["notebook_ref"] = e.notebook_ref;
    j["dataset_ref"] = optional_text(e.dataset_ref);
    arr.push_back(std::move(j));
  }
  return dump(arr) + "\n";
}

std::vector<TraceIndexEntry> parse_index(std::string_view text) {
  std::vector<TraceIndexEntry> out;
  try {
    for (const auto& j : ojson::parse(text)) {
      out.push_back(TraceIndexEntry{j.at("trace").get<std::string>(), j.at("notebook_ref").get<std::string>(),
                                    read_optional_text(j, "dataset_ref")});
    }
  } catch (const nlohmann::json::exception& e) {
    throw TraceFormatError(std::string("bad trace index: ") + e.what());
  }
  return out;
}

std::vector<TraceIndexEntry> write_traces(const std::vector<NotebookTrace>& traces, const fs::path& out_dir) {
  std::vector<const NotebookTrace*> ordered;
  for (const auto& t : traces) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(), [](const NotebookTrace* a, const NotebookTrace* b) {
    return std::forward_as_tuple(dataset_name_of(*a), a->notebook_ref) <
           std::forward_as_tuple(dataset_name_of(*b), b->notebook_ref);
  });
  fs::path dir = out_dir / "traces";
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::vector<TraceIndexEntry> index;
  std::set<std::string> used;
  for (const NotebookTrace* t : ordered) {
    std::string name = trace_file_name(t->notebook_ref);
    std::string stem = name.substr(0, name.size() - std::string_view(".trace.json").size());
    for (int n = 2; used.count(name) != 0; ++n) name = stem + "-" + std::to_string(n) + ".trace.json";
    used.insert(name);
    write_trace(*t, dir / name);
    index.push_back(TraceIndexEntry{name, t->notebook_ref, t->dataset_ref});
  }
  write_text_file(dir / "index.json", serialize_index(index));
  return index;
}

std::vector<NotebookTrace> load_traces(const fs::path& traces_dir) {
  std::vector<NotebookTrace> out;
  fs::path index_path = traces_dir / "index.json";
  if (fs::exists(index_path)) {
    for (const auto& e : parse_index(read_text_file(index_path))) {
      NotebookTrace t;
      t.notebook_ref = e.notebook_ref;
      t.dataset_ref = e.dataset_ref;
      t.records = parse_trace(read_text_file(traces_dir / e.trace_file));
      out.push_back(std::move(t));
    }
  } else if (fs::is_directory(traces_dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(traces_dir)) {
      std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.size() > 11 && name.ends_with(".trace.json")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      NotebookTrace t;
      std::string name = f.filename().string();
      t.notebook_ref = name.substr(0, name.size() - 11);
      t.records = parse_trace(read_text_file(f));
      out.push_back(std::move(t));
    }
  } else {
    throw IOFailure("no trace directory at " + traces_dir.string());
  }
  sort_traces(out);
  return out;
}

Summary write_report(const std::vector<NotebookTrace>& traces, const fs::path& out_dir) {
  std::vector<NotebookTrace> ordered = traces;
  sort_traces(ordered);
  Summary s = summarize(ordered);
  write_text_file(out_dir / "summary.csv", summary_csv(s.rows));
  write_text_file(out_dir / "stats.json", stats_json(s.stats));
  return s;
}

void write_diagnostics(const Diagnostics& diagnostics, const fs::path& file) {
  write_text_file(file, diagnostics_jsonl(diagnostics));
}

}  // namespace nbtrace
