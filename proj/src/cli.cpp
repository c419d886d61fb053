// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/cli.hpp"

#include <CLI11.hpp>

#include <ostream>

#include "nbtrace/config.hpp"
#include "nbtrace/notebook.hpp"
#include "nbtrace/pipeline.hpp"
#include "nbtrace/var_roles.hpp"

namespace nbtrace::cli {

namespace fs = std::filesystem;

namespace {

struct Args {
  std::string config;
  std::string out;
  unsigned jobs = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> paths;
  std::string dataset;
  std::string notebook;
  std::vector<std::string> terms;
  std::string traces;
};

PipelineConfig config_with_overrides(const Args& a) {
  PipelineConfig c = load_config(a.config);
  // An empty ledger_path follows out_dir.
  if (!a.out.empty()) c.out_dir = a.out;
  return c;
}

int do_harvest(const Args& a, std::ostream& out, std::ostream& err) {
  PipelineConfig c = config_with_overrides(a);
  PipelineOptions o;
  o.seed = a.seed;
  o.log = [&err](const std::string& m) { err << m << '\n'; };
  harvest::HarvestResult r = run_harvest_stage(c, o);
  out << "fetched " << r.notebooks_fetched << " notebooks from " << r.datasets_touched << " datasets ("
      << r.pages_visited << " pages, " << r.rate_limit_events << " rate-limit events)\n";
  return kExitOk;
}

int do_convert(const Args& a, std::ostream& out) {
  std::vector<fs::path> paths(a.paths.begin(), a.paths.end());
  std::optional<std::string> dataset;
  if (!a.dataset.empty()) dataset = a.dataset;
  ConvertOutcome r = convert_to_directory(collect_inputs(paths, dataset), a.out, a.jobs);
  out << "converted " << r.traces.size() << " notebooks, skipped " << r.skipped << ", " << r.diagnostics.size()
      << " diagnostics\n";
  return kExitOk;
}

int do_analyze_term(const Args& a, std::ostream& out) {
  NotebookDocument doc = load_notebook(a.notebook);
  syntax::SyntaxTree whole;
  for (const Cell& cell : extract_code_cells(doc)) {
    try {
      auto tree = syntax::parse_module(sanitize_cell(cell).text);
      whole.statements.insert(whole.statements.end(), tree.statements.begin(), tree.statements.end());
    } catch (const syntax::SyntaxError&) {
      // Unparseable cells contribute nothing, as in conversion.
    }
  }
  TermIndex index(whole);
  for (const auto& term : a.terms) out << index.analyze(term).message << '\n';
  return kExitOk;
}

int do_report(const Args& a, std::ostream& out) {
  std::vector<NotebookTrace> traces = load_traces(a.traces);
  Summary s = write_report(traces, a.out);
  out << "wrote " << s.rows.size() << " summary rows for " << s.stats.notebooks_processed << " notebooks\n";
  return kExitOk;
}

int do_pipeline(const Args& a, std::ostream& out, std::ostream& err) {
  PipelineConfig c = config_with_overrides(a);
  PipelineOptions o;
  o.jobs = a.jobs;
  o.seed = a.seed;
  o.log = [&err](const std::string& m) { err << m << '\n'; };
  PipelineOutcome r = run_pipeline(c, o);
  out << "fetched " << r.harvest.notebooks_fetched << " notebooks (" << r.harvest.rate_limit_events
      << " rate-limit events); converted " << r.convert.traces.size() << ", skipped " << r.convert.skipped << "; "
      << r.summary.rows.size() << " summary rows\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Static data-wrangling traces from computational notebooks", "nbtrace"};
  app.require_subcommand(1);
  Args a;

  auto* harvest = app.add_subcommand("harvest", "Crawl datasets and their notebooks");
  harvest->add_option("--config", a.config, "Pipeline config file")->required()->check(CLI::ExistingFile);
  harvest->add_option("--out", a.out, "Override out_dir");
  harvest->add_option("--seed", a.seed, "Seed for backoff jitter");

  auto* convert = app.add_subcommand("convert", "Convert notebooks to trace files");
  convert->add_option("paths", a.paths, "Notebook files or directories")->required();
  convert->add_option("--out", a.out, "Output directory")->required();
  convert->add_option("--jobs", a.jobs, "Worker threads (0: all cores)");
  convert->add_option("--dataset", a.dataset, "Dataset ref to attribute the notebooks to");

  auto* analyze = app.add_subcommand("analyze-term", "Report the role of a name in a notebook");
  analyze->add_option("--notebook", a.notebook, "Notebook file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--term", a.terms, "Name to look up (repeatable)")->required();

  auto* report = app.add_subcommand("report", "Summarize a directory of traces");
  report->add_option("--traces", a.traces, "Trace directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", a.out, "Output directory")->required();

  auto* pipeline = app.add_subcommand("pipeline", "Harvest, convert and report");
  pipeline->add_option("--config", a.config, "Pipeline config file")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--out", a.out, "Override out_dir");
  pipeline->add_option("--jobs", a.jobs, "Worker threads (0: all cores)");
  pipeline->add_option("--seed", a.seed, "Seed for backoff jitter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*harvest) return do_harvest(a, out, err);
    if (*convert) return do_convert(a, out);
    if (*analyze) return do_analyze_term(a, out);
    if (*report) return do_report(a, out);
    if (*pipeline) return do_pipeline(a, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitUsage;
}

}  // namespace nbtrace::cli
