// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "mock_catalog.hpp"
#include "nbtrace/harvest.hpp"
#include "nbtrace/imports.hpp"
#include "nbtrace/lineage.hpp"
#include "nbtrace/notebook.hpp"
#include "nbtrace/pipeline.hpp"
#include "nbtrace/reporter.hpp"
#include "nbtrace/syntax.hpp"
#include "nbtrace/var_roles.hpp"

namespace {

namespace fs = std::filesystem;
namespace h = nbtrace::harvest;
using namespace nbtrace;
using testing::fixture;
using testing::slurp;
using testing::TempDir;

// Collects failed expectations; the first few are printed.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string squash(const std::string& s) {
  std::string out;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (!in_string && (c == ' ' || c == '\n' || c == '\t' || c == '\r')) continue;
    out += c;
  }
  return out;
}

NotebookTrace convert_path(const fs::path& p) { return convert_notebook(load_notebook(p.string())); }

std::vector<fs::path> fixture_notebooks() {
  std::vector<fs::path> files = testing::corpus_notebooks();
  for (const char* dir : {"notebooks", "robustness"}) {
    std::vector<fs::path> more;
    for (const auto& e : fs::directory_iterator(fixture(dir))) more.push_back(e.path());
    std::sort(more.begin(), more.end());
    files.insert(files.end(), more.begin(), more.end());
  }
  return files;
}

void schema_golden(Check& c) {
  const std::string published =
      R"x({"operation_type": "", "new_df": null, "prev_df": null, "code": "df.head(3)", )x"
      R"x("required_variables": {}, "imports": {}, "snippet_cell_number": 11})x";
  NotebookTrace t = convert_path(fixture("notebooks/head_only.ipynb"));
  c.expect(t.records.size() == 1, "expected one record, got " + std::to_string(t.records.size()));
  c.expect(squash(serialize_trace(t.records)) == "[" + squash(published) + "]",
           "record differs: " + serialize_trace(t.records));
}

void taxonomy_oracle(Check& c) {
  auto oracle = nlohmann::json::parse(slurp(fixture("corpus/oracle.json")));
  std::vector<fs::path> files = testing::corpus_notebooks();
  c.expect(files.size() >= 20, "corpus has only " + std::to_string(files.size()) + " notebooks");
  std::map<std::string, int> totals;
  for (const auto& f : files) {
    NotebookTrace t = convert_path(f);
    std::map<std::string, int> counts;
    for (const auto& r : t.records) {
      if (!r.operation_type.empty()) ++counts[r.operation_type];
    }
    const auto& expected = oracle["notebooks"][f.filename().string()];
    for (const auto& [label, n] : expected.items()) {
      int got = counts.count(label) ? counts[label] : 0;
      c.expect(got == n.get<int>(), f.filename().string() + " " + label + ": got " + std::to_string(got) +
                                        ", oracle " + std::to_string(n.get<int>()));
      totals[label] += got;
      counts.erase(label);
    }
    for (const auto& [label, n] : counts) c.expect(false, f.filename().string() + " unexpected label " + label);
  }
  for (const auto& [label, n] : oracle["totals"].items()) {
    c.expect(totals[label] == n.get<int>(), "total " + label + " got " + std::to_string(totals[label]));
    c.expect(n.get<int>() > 0, "label " + label + " is not exercised");
  }
}

void variable_roles(Check& c) {
  syntax::SyntaxTree whole;
  for (const Cell& cell : extract_code_cells(load_notebook(fixture("notebooks/roles.ipynb").string()))) {
    auto t = syntax::parse_module(cell.source);
    whole.statements.insert(whole.statements.end(), t.statements.begin(), t.statements.end());
  }
  const std::pair<const char*, const char*> messages[] = {
      {"clean_fare", "Function definition:\ndef clean_fare(x):\n    if x > 100:\n        return 100\n    return x"},
      {"halve", "Lambda function:\nlambda v: v / 2"},
      {"sex_map", "'sex_map' is a variable with value: {'male': 0, 'female': 1}"},
  };
  for (const auto& [term, message] : messages) {
    std::string got = analyze_term(whole, term).message;
    c.expect(got == message, std::string(term) + ": " + got);
  }

  auto spec = nlohmann::json::parse(slurp(fixture("value_kinds.json")));
  auto context = syntax::parse_module(spec["context"].get<std::string>());
  c.expect(spec["arguments"].size() == 12, "expected 12 argument fixtures");
  std::set<std::string> kinds;
  for (const auto& a : spec["arguments"]) {
    std::string expr = a["expr"];
    std::string expected = a["kind"];
    kinds.insert(expected);
    std::string got(to_string(classify_value(*syntax::parse_expression(expr), context)));
    c.expect(got == expected, expr + ": got " + got + ", oracle " + expected);
  }
  c.expect(kinds.size() == 4, "argument fixtures do not cover every kind");
}

struct CrawlRun {
  h::HarvestResult result;
  std::vector<h::RequestLogEntry> log;
};

CrawlRun crawl(const fs::path& catalog, const fs::path& ledger_file, const fs::path& sink_dir, int target) {
  h::ManualClock clock;
  h::MockClient client(catalog, clock);
  h::CrawlLedger ledger(ledger_file);
  h::FileSink sink(sink_dir);
  h::HarvestConfig config;
  config.target_notebook_count = target;
  CrawlRun run;
  run.result = h::run_harvest(client, config, ledger, sink, {&clock, 60, 7});
  run.log = client.request_log();
  return run;
}

void crawler_contract(Check& c) {
  TempDir dir;
  testing::MockCatalogSpec spec;
  spec.rate_limit_after = 600;
  testing::MockCatalog cat = testing::write_mock_catalog(dir / "catalog", spec);
  c.expect(cat.acceptable_notebooks.size() >= 700, "catalog too small for the target");

  std::vector<h::RequestLogEntry> all_requests;
  auto note_log = [&](const CrawlRun& r) { all_requests.insert(all_requests.end(), r.log.begin(), r.log.end()); };

  // (b) one run to 700 through the rate limit.
  CrawlRun full = crawl(dir / "catalog", dir / "full/ledger.jsonl", dir / "full", 700);
  note_log(full);
  c.expect(full.result.rate_limit_events >= 1, "no backoff event");
  c.expect(full.result.notebooks_fetched == 700, "fetched " + std::to_string(full.result.notebooks_fetched));
  c.expect(full.result.target_reached, "target not reached");
  std::vector<std::string> expected(cat.acceptable_notebooks.begin(), cat.acceptable_notebooks.begin() + 700);
  c.expect(full.result.fetched_notebook_refs == expected, "fetched refs differ from the first 700 acceptable");
  h::CrawlLedger replay(dir / "full/ledger.jsonl");
  int on_disk = 0;
  for (const auto& e : replay.notebook_entries()) on_disk += fs::exists(h::FileSink::notebook_path(dir / "full", e.dataset_ref, e.ref));
  c.expect(replay.notebook_entries().size() == 700 && on_disk == 700,
           "ledger/disk hold " + std::to_string(on_disk) + " of 700");

  // (c) a second run on the finished ledger, and a split 350 + 350 crawl.
  CrawlRun again = crawl(dir / "catalog", dir / "full/ledger.jsonl", dir / "full", 700);
  note_log(again);
  c.expect(again.result.notebooks_fetched == 0, "re-run fetched " + std::to_string(again.result.notebooks_fetched));
  CrawlRun first = crawl(dir / "catalog", dir / "split/ledger.jsonl", dir / "split", 350);
  CrawlRun second = crawl(dir / "catalog", dir / "split/ledger.jsonl", dir / "split", 700);
  note_log(first);
  note_log(second);
  std::set<std::string> seen;
  int duplicates = 0;
  for (const CrawlRun* r : {&first, &second}) {
    for (const auto& ref : r->result.fetched_notebook_refs) duplicates += !seen.insert(ref).second;
  }
  c.expect(duplicates == 0, std::to_string(duplicates) + " duplicate fetches across runs");
  c.expect(seen.size() == 700, "split crawl fetched " + std::to_string(seen.size()));

  // (a) page cap over every request made above.
  int max_page = 0;
  for (const auto& e : all_requests) max_page = std::max(max_page, e.page);
  c.expect(max_page <= 20, "request for page " + std::to_string(max_page));
  c.expect(max_page == 20, "page cap never reached; max page " + std::to_string(max_page));

  // (d) filters, checked against the generated metadata.
  for (const CrawlRun* r : {&full, &first, &second}) {
    for (const auto& ref : r->result.fetched_notebook_refs) {
      auto it = cat.notebooks.find(ref);
      bool ok = it != cat.notebooks.end() && it->second.upvotes < 10;
      c.expect(ok, "fetched notebook " + ref + " fails the upvote filter");
    }
    for (const auto& ref : r->result.accepted_dataset_refs) {
      auto it = std::find_if(cat.datasets.begin(), cat.datasets.end(), [&](const h::DatasetMeta& d) { return d.ref == ref; });
      bool ok = it != cat.datasets.end() && it->size_bytes <= 10'000'000 && it->usability_score >= 0.7;
      c.expect(ok, "accepted dataset " + ref + " fails the size or usability filter");
    }
  }
}

void robustness(Check& c) {
  for (const char* nb : {"robustness/loops.ipynb", "robustness/try_except.ipynb", "robustness/nested_defs.ipynb"}) {
    try {
      convert_path(fixture(nb));
    } catch (const std::exception& e) {
      c.expect(false, std::string(nb) + " aborted: " + e.what());
    }
  }
  // The loop bodies in loops.ipynb mutate df three times.
  NotebookTrace loops = convert_path(fixture("robustness/loops.ipynb"));
  const std::pair<int, const char*> mutations[] = {
      {1, "df[c] = df[c].fillna(0)"}, {1, "df[c] = df[c].astype(float)"}, {2, "df = df.drop(columns=['Cabin'])"}};
  for (const auto& [cell, code] : mutations) {
    bool record = std::any_of(loops.records.begin(), loops.records.end(), [&](const SnippetRecord& r) {
      return r.snippet_cell_number == cell && r.code == code;
    });
    bool diagnostic = std::any_of(loops.diagnostics.begin(), loops.diagnostics.end(), [&](const Diagnostic& d) {
      return d.cell == cell && d.category == diag::kLoopBody && d.message.find(std::string("'") + code + "'") != std::string::npos;
    });
    c.expect(record, std::string("no record for ") + code);
    c.expect(diagnostic, std::string("no loop diagnostic for ") + code);
  }

  std::vector<NotebookInput> inputs = collect_inputs({fixture("robustness"), fixture("notebooks")}, std::nullopt);
  ConvertOutcome batch = convert_batch(inputs, 2);
  std::set<std::string> converted;
  for (const auto& t : batch.traces) converted.insert(t.notebook_ref);
  bool corrupt_reported = std::any_of(batch.diagnostics.begin(), batch.diagnostics.end(), [](const Diagnostic& d) {
    return d.category == diag::kMalformedNotebook && d.notebook_ref.find("corrupt") != std::string::npos;
  });
  c.expect(corrupt_reported, "corrupt notebook not reported");
  for (const auto& in : inputs) {
    std::string name = in.path.filename().string();
    bool should_convert = name != "corrupt.ipynb" && name != "r_kernel.ipynb";
    c.expect(converted.count(in.notebook_ref) == (should_convert ? 1u : 0u), "batch outcome wrong for " + name);
  }
}

void determinism(Check& c) {
  TempDir dir;
  testing::MockCatalogSpec spec;
  spec.datasets = 40;
  spec.bulk_kernels = 300;
  spec.rate_limit_after = 50;
  spec.repeat = true;
  for (const auto& f : testing::corpus_notebooks()) spec.notebook_sources.push_back(slurp(f));
  testing::write_mock_catalog(dir / "catalog", spec);

  auto run = [&](const std::string& name, unsigned jobs) {
    PipelineConfig config;
    config.fixture_dir = dir / "catalog";
    config.out_dir = dir / name;
    config.harvest.target_notebook_count = 120;
    PipelineOptions options;
    options.jobs = jobs;
    options.seed = 3;
    return run_pipeline(config, options);
  };
  PipelineOutcome a = run("a", 1);
  PipelineOutcome b = run("b", 4);
  c.expect(a.convert.traces.size() == 120, "converted " + std::to_string(a.convert.traces.size()));
  c.expect(a.harvest.rate_limit_events > 0, "scenario did not exercise backoff");
  c.expect(testing::tree_contents(dir / "a/traces") == testing::tree_contents(dir / "b/traces"), "traces differ");
  for (const char* file : {"summary.csv", "stats.json", "diagnostics.jsonl"}) {
    c.expect(slurp(dir / "a" / file) == slurp(dir / "b" / file), std::string(file) + " differs");
  }
}

void property_suites(Check& c) {
  int statements = 0;
  int records = 0;
  std::vector<NotebookTrace> corpus_traces;
  for (const auto& f : fixture_notebooks()) {
    NotebookDocument nb;
    try {
      nb = load_notebook(f.string());
      extract_code_cells(nb);
    } catch (const std::exception&) {
      continue;  // corrupt and non-Python fixtures
    }
    ImportTable table;
    for (const Cell& cell : extract_code_cells(nb)) {
      syntax::SyntaxTree tree;
      try {
        tree = syntax::parse_module(sanitize_cell(cell).text);
      } catch (const syntax::SyntaxError&) {
        continue;
      }
      for (const auto& s : tree.statements) {
        ++statements;
        std::string text = syntax::render_source(*s);
        bool same = false;
        try {
          auto again = syntax::parse_module(text);
          same = again.statements.size() == 1 && syntax::structurally_equal(*s, *again.statements[0]);
        } catch (const syntax::SyntaxError&) {
        }
        c.expect(same, "round-trip fails: " + text);

        collect_imports(*s, cell.index, table);
        ImportTable referenced = imports_referenced_by(*s, table);
        for (const auto& [alias, entry] : referenced.entries()) {
          const ImportEntry* full = table.find(alias);
          c.expect(full != nullptr && full->module == entry.module, "import " + alias + " not in the table");
        }
      }
    }
    NotebookTrace t = convert_notebook(nb);
    for (std::size_t i = 1; i < t.records.size(); ++i) {
      const auto& x = t.records[i - 1];
      const auto& y = t.records[i];
      c.expect(std::pair(x.snippet_cell_number, x.statement_index) < std::pair(y.snippet_cell_number, y.statement_index),
               f.filename().string() + ": records out of order");
    }
    records += static_cast<int>(t.records.size());
    corpus_traces.push_back(std::move(t));
  }
  c.expect(statements > 200 && records > 100, "too few statements checked");

  std::size_t labeled = 0;
  for (const auto& t : corpus_traces) {
    for (const auto& r : t.records) labeled += !r.operation_type.empty();
  }
  sort_traces(corpus_traces);
  c.expect(summarize(corpus_traces).rows.size() == labeled, "summary rows != labeled records");

  std::mt19937_64 rng(99);
  for (int n = 1; n <= 6; ++n) {
    double nominal = std::min(30'000.0 * std::pow(2.0, n - 1), 900'000.0);
    for (int i = 0; i < 200; ++i) {
      double d = static_cast<double>(h::backoff_schedule(n, rng).count());
      c.expect(d >= std::floor(nominal * 0.8) && d <= std::ceil(nominal * 1.2),
               "attempt " + std::to_string(n) + " delay " + std::to_string(d));
    }
  }
  bool aborted = false;
  try {
    h::backoff_schedule(7, rng);
  } catch (const h::AbortedAfterMaxRetries&) {
    aborted = true;
  }
  c.expect(aborted, "attempt 7 did not abort");
}

struct Criterion {
  int number;
  const char* name;
  double limit_seconds;  // 0: no limit
  std::function<void(Check&)> body;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "schema golden record for df.head(3) at cell 11", 1.0, schema_golden},
      {2, "taxonomy counts equal the corpus oracle", 30.0, taxonomy_oracle},
      {3, "variable-role messages and 12 argument kinds", 0.0, variable_roles},
      {4, "crawler contract under the mock catalog", 60.0, crawler_contract},
      {5, "robustness on loops, try/except, nested defs, corrupt input", 0.0, robustness},
      {6, "two pipeline runs are byte-identical", 0.0, determinism},
      {7, "property suites", 0.0, property_suites},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.limit_seconds > 0 && seconds >= cr.limit_seconds) {
      check.expect(false, "took " + std::to_string(seconds) + " s, limit " + std::to_string(cr.limit_seconds) + " s");
    }
    bool ok = check.failures.empty();
    failed += !ok;
    std::ostringstream line;
    line << (ok ? "PASS" : "FAIL") << " criterion " << cr.number << ": " << cr.name << " (" << std::fixed;
    line.precision(3);
    line << seconds << " s)";
    std::cout << line.str() << std::endl;
    for (std::size_t i = 0; i < check.failures.size() && i < 5; ++i) std::cout << "    " << check.failures[i] << '\n';
  }
  return failed == 0 ? 0 : 1;
}
