// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

// Batch conversion and the harvest -> convert -> report pipeline.

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nbtrace/config.hpp"
#include "nbtrace/diagnostics.hpp"
#include "nbtrace/harvest.hpp"
#include "nbtrace/lineage.hpp"
#include "nbtrace/reporter.hpp"

namespace nbtrace {

struct NotebookInput {
  std::filesystem::path path;
  std::string notebook_ref;
  std::optional<std::string> dataset_ref;
};

struct ConvertOutcome {
  std::vector<NotebookTrace> traces;  // converted notebooks, (dataset, ref) order
  Diagnostics diagnostics;            // skipped notebooks first, then per-trace diagnostics
  int skipped = 0;
};

/// Expands directories to the `.ipynb` files below them, sorted by path.
std::vector<NotebookInput> collect_inputs(const std::vector<std::filesystem::path>& paths,
                                          const std::optional<std::string>& dataset_ref);

/// Converts notebooks on `jobs` worker threads (0: hardware concurrency).
/// Unreadable, malformed and non-target-kernel notebooks are skipped with a
/// diagnostic; the result does not depend on `jobs`.
ConvertOutcome convert_batch(const std::vector<NotebookInput>& inputs, unsigned jobs);

/// convert_batch plus out/traces/*.trace.json, out/traces/index.json and
/// out/diagnostics.jsonl.
ConvertOutcome convert_to_directory(const std::vector<NotebookInput>& inputs, const std::filesystem::path& out_dir,
                                    unsigned jobs);

struct PipelineOutcome {
  harvest::HarvestResult harvest;
  ConvertOutcome convert;
  Summary summary;
};

struct PipelineOptions {
  unsigned jobs = 0;
  harvest::HarvestClient* client = nullptr;  // overrides the configured client
  harvest::Clock* clock = nullptr;
  std::uint64_t seed = 0;
  std::function<void(const std::string&)> log;
};

/// Client for a configuration: the fixture catalog in mock mode, otherwise
/// the live API with credentials from the environment.
std::unique_ptr<harvest::HarvestClient> make_client(const PipelineConfig& config, harvest::Clock& clock);

harvest::HarvestResult run_harvest_stage(const PipelineConfig& config, const PipelineOptions& options);

/// Harvest, then convert every notebook recorded in the ledger, then report.
PipelineOutcome run_pipeline(const PipelineConfig& config, const PipelineOptions& options = {});

}  // namespace nbtrace
