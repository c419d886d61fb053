// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/config.hpp"

#include <charconv>
#include <set>

#include "nbtrace/reporter.hpp"

namespace nbtrace {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(const std::string& key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(key, "'" + std::string(value) + "' is not a valid number");
  }
  return out;
}

int parse_int(const std::string& key, std::string_view value, long long min) {
  auto v = parse_number<long long>(key, value);
  if (v < min) throw ConfigError(key, "must be at least " + std::to_string(min));
  if (v > 1'000'000'000) throw ConfigError(key, "value too large");
  return static_cast<int>(v);
}

fs::path parse_path(const std::string& key, std::string_view value, const fs::path& base) {
  if (value.empty()) throw ConfigError(key, "path must not be empty");
  fs::path p{std::string(value)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  PipelineConfig c;
  std::set<std::string> seen;
  int line_no = 0;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");

    if (key == "min_usability_score") {
      double v = parse_number<double>(key, value);
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must lie in [0, 1]");
      c.harvest.min_usability_score = v;
    } else if (key == "max_dataset_bytes") {
      if (!value.empty() && value.front() == '-') throw ConfigError(key, "must be positive");
      auto v = parse_number<std::uint64_t>(key, value);
      if (v == 0) throw ConfigError(key, "must be positive");
      c.harvest.max_dataset_bytes = v;
    } else if (key == "target_notebook_count") {
      c.harvest.target_notebook_count = parse_int(key, value, 1);
    } else if (key == "max_upvotes_exclusive") {
      c.harvest.max_upvotes_exclusive = parse_int(key, value, 1);
    } else if (key == "max_pages") {
      c.harvest.max_pages = parse_int(key, value, 1);
    } else if (key == "page_size") {
      c.harvest.page_size = parse_int(key, value, 1);
    } else if (key == "min_distinct_datasets") {
      c.harvest.min_distinct_datasets = parse_int(key, value, 1);
    } else if (key == "out_dir") {
      c.out_dir = parse_path(key, value, base_dir);
    } else if (key == "ledger_path") {
      c.ledger_path = parse_path(key, value, base_dir);
    } else if (key == "fixture_dir") {
      if (!value.empty()) c.fixture_dir = parse_path(key, value, base_dir);
    } else if (key == "rate_per_minute") {
      c.rate_per_minute = parse_int(key, value, 0);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IOFailure& e) {
    throw ConfigError("", e.what());
  }
  return parse_config(text, path.parent_path());
}

std::string dump_config(const PipelineConfig& c) {
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) {
    out += std::string(key) + " = " + value + "\n";
  };
  put("min_usability_score", format_double(c.harvest.min_usability_score));
  put("max_dataset_bytes", std::to_string(c.harvest.max_dataset_bytes));
  put("target_notebook_count", std::to_string(c.harvest.target_notebook_count));
  put("max_upvotes_exclusive", std::to_string(c.harvest.max_upvotes_exclusive));
  put("max_pages", std::to_string(c.harvest.max_pages));
  put("page_size", std::to_string(c.harvest.page_size));
  put("min_distinct_datasets", std::to_string(c.harvest.min_distinct_datasets));
  put("out_dir", c.out_dir.string());
  if (!c.ledger_path.empty()) put("ledger_path", c.ledger_path.string());
  if (c.fixture_dir) put("fixture_dir", c.fixture_dir->string());
  put("rate_per_minute", std::to_string(c.rate_per_minute));
  return out;
}

}  // namespace nbtrace
