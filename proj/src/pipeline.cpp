// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <tuple>

#include "nbtrace/notebook.hpp"

namespace nbtrace {

namespace fs = std::filesystem;

std::vector<NotebookInput> collect_inputs(const std::vector<fs::path>& paths,
                                          const std::optional<std::string>& dataset_ref) {
  std::vector<NotebookInput> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".ipynb") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      for (const auto& f : found) out.push_back(NotebookInput{f, f.generic_string(), dataset_ref});
    } else {
      out.push_back(NotebookInput{p, p.generic_string(), dataset_ref});
    }
  }
  return out;
}

namespace {

struct Converted {
  std::optional<NotebookTrace> trace;
  std::optional<Diagnostic> skipped;
};

Converted convert_one(const NotebookInput& in) {
  Converted c;
  try {
    std::string raw = read_text_file(in.path);
    NotebookDocument doc = parse_notebook(raw, in.notebook_ref);
    c.trace = convert_notebook(doc, in.dataset_ref);
  } catch (const IOFailure& e) {
    c.skipped = Diagnostic{in.notebook_ref, std::nullopt, diag::kIoFailure, e.what()};
  } catch (const MalformedNotebook& e) {
    c.skipped = Diagnostic{in.notebook_ref, std::nullopt, diag::kMalformedNotebook, e.what()};
  } catch (const UnsupportedKernel& e) {
    c.skipped = Diagnostic{in.notebook_ref, std::nullopt, diag::kUnsupportedKernel, e.what()};
  }
  return c;
}

}  // namespace

ConvertOutcome convert_batch(const std::vector<NotebookInput>& inputs, unsigned jobs) {
  std::vector<Converted> results(inputs.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(inputs.size(), 1)));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) results[i] = convert_one(inputs[i]);
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ConvertOutcome out;
  for (auto& r : results) {
    if (r.skipped) {
      out.diagnostics.push_back(std::move(*r.skipped));
      ++out.skipped;
    } else {
      out.traces.push_back(std::move(*r.trace));
    }
  }
  sort_traces(out.traces);
  for (const auto& t : out.traces) {
    out.diagnostics.insert(out.diagnostics.end(), t.diagnostics.begin(), t.diagnostics.end());
  }
  return out;
}

ConvertOutcome convert_to_directory(const std::vector<NotebookInput>& inputs, const fs::path& out_dir, unsigned jobs) {
  ConvertOutcome out = convert_batch(inputs, jobs);
  write_traces(out.traces, out_dir);
  write_diagnostics(out.diagnostics, out_dir / "diagnostics.jsonl");
  return out;
}

std::unique_ptr<harvest::HarvestClient> make_client(const PipelineConfig& config, harvest::Clock& clock) {
  if (config.fixture_dir) {
    if (!fs::is_directory(*config.fixture_dir)) {
      throw ConfigError("fixture_dir", "no such directory: " + config.fixture_dir->string());
    }
    return std::make_unique<harvest::MockClient>(*config.fixture_dir, clock, config.harvest.max_pages);
  }
  return std::make_unique<harvest::LiveClient>(harvest::LiveClient::from_environment());
}

harvest::HarvestResult run_harvest_stage(const PipelineConfig& config, const PipelineOptions& options) {
  // Mock mode runs on virtual time: backoff pauses and pacing do not block.
  harvest::ManualClock virtual_clock;
  harvest::SystemClock wall_clock;
  harvest::Clock* clock = options.clock;
  if (clock == nullptr) clock = config.fixture_dir ? static_cast<harvest::Clock*>(&virtual_clock) : &wall_clock;

  std::unique_ptr<harvest::HarvestClient> owned;
  harvest::HarvestClient* client = options.client;
  if (client == nullptr) {
    owned = make_client(config, *clock);
    client = owned.get();
  }
  harvest::CrawlLedger ledger(config.effective_ledger_path());
  harvest::FileSink sink(config.out_dir);
  harvest::HarvestOptions ho;
  ho.clock = clock;
  ho.rate_per_minute = config.rate_per_minute;
  ho.seed = options.seed;
  ho.log = options.log;
  return harvest::run_harvest(*client, config.harvest, ledger, sink, ho);
}

PipelineOutcome run_pipeline(const PipelineConfig& config, const PipelineOptions& options) {
  PipelineOutcome out;
  out.harvest = run_harvest_stage(config, options);

  harvest::CrawlLedger ledger(config.effective_ledger_path());
  std::vector<NotebookInput> inputs;
  for (const auto& e : ledger.notebook_entries()) {
    inputs.push_back(
        NotebookInput{harvest::FileSink::notebook_path(config.out_dir, e.dataset_ref, e.ref), e.ref, e.dataset_ref});
  }
  std::sort(inputs.begin(), inputs.end(), [](const NotebookInput& a, const NotebookInput& b) {
    return std::tie(*a.dataset_ref, a.notebook_ref) < std::tie(*b.dataset_ref, b.notebook_ref);
  });
  out.convert = convert_to_directory(inputs, config.out_dir, options.jobs);
  out.summary = write_report(out.convert.traces, config.out_dir);
  return out;
}

}  // namespace nbtrace
