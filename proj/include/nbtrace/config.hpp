// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "nbtrace/harvest.hpp"

namespace nbtrace {

/// Flat `key = value` pipeline configuration. Blank lines and lines starting
/// with `#` are ignored.
struct PipelineConfig {
  harvest::HarvestConfig harvest;
  std::filesystem::path out_dir = "out";
  std::filesystem::path ledger_path;  // empty: <out_dir>/ledger.jsonl
  std::optional<std::filesystem::path> fixture_dir;  // set: mock mode
  int rate_per_minute = 60;

  std::filesystem::path effective_ledger_path() const {
    return ledger_path.empty() ? out_dir / "ledger.jsonl" : ledger_path;
  }

  bool operator==(const PipelineConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, std::string reason)
      : std::runtime_error(key.empty() ? reason : key + ": " + reason), key_(std::move(key)), reason_(std::move(reason)) {}
  const std::string& key() const { return key_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string key_;
  std::string reason_;
};

/// Relative paths are resolved against `base_dir`.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads `path`; relative paths inside resolve against its directory.
PipelineConfig load_config(const std::filesystem::path& path);

/// Every key, in a fixed order, so parse_config(dump_config(c)) == c.
std::string dump_config(const PipelineConfig& config);

}  // namespace nbtrace
