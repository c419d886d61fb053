// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "nbtrace/config.hpp"
#include "nbtrace/reporter.hpp"

namespace nbtrace {
namespace {

namespace fs = std::filesystem;
using testing::fixture;
using testing::TempDir;

std::string error_key(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

TEST(Config, MissingKeysUseDefaults) {
  PipelineConfig c = parse_config("target_notebook_count = 100\nout_dir = ./out\n");
  EXPECT_EQ(c.harvest.max_upvotes_exclusive, 10);
  EXPECT_EQ(c.harvest.max_pages, 20);
  EXPECT_EQ(c.harvest.page_size, 100);
  EXPECT_EQ(c.harvest.target_notebook_count, 100);
  EXPECT_DOUBLE_EQ(c.harvest.min_usability_score, 0.7);
  EXPECT_EQ(c.harvest.max_dataset_bytes, 10'000'000u);
  EXPECT_EQ(c.out_dir, fs::path("out"));
  EXPECT_EQ(c.effective_ledger_path(), fs::path("out/ledger.jsonl"));
  EXPECT_FALSE(c.fixture_dir.has_value());
}

TEST(Config, RejectsBadValues) {
  EXPECT_EQ(error_key("max_pages = -1"), "max_pages");
  EXPECT_EQ(error_key("max_pages = 0"), "max_pages");
  EXPECT_EQ(error_key("page_size = ten"), "page_size");
  EXPECT_EQ(error_key("page_size = 10x"), "page_size");
  EXPECT_EQ(error_key("min_usability_score = 1.5"), "min_usability_score");
  EXPECT_EQ(error_key("max_dataset_bytes = -3"), "max_dataset_bytes");
  EXPECT_EQ(error_key("out_dir ="), "out_dir");
  EXPECT_EQ(error_key("colour = blue"), "colour");
  EXPECT_EQ(error_key("max_pages = 3\nmax_pages = 4"), "max_pages");
  EXPECT_EQ(error_key("just words"), "");
}

TEST(Config, CommentsAndBlankLines) {
  PipelineConfig c = parse_config("# crawl\n\n  page_size = 50  \n# max_pages = 1\n");
  EXPECT_EQ(c.harvest.page_size, 50);
  EXPECT_EQ(c.harvest.max_pages, 20);
}

TEST(Config, LoadDumpLoadIsAFixpoint) {
  TempDir dir;
  fs::path file = dir / "full.cfg";
  write_text_file(file,
                  "min_usability_score = 0.65\n"
                  "max_dataset_bytes = 2500000\n"
                  "target_notebook_count = 700\n"
                  "max_upvotes_exclusive = 5\n"
                  "max_pages = 12\n"
                  "page_size = 40\n"
                  "min_distinct_datasets = 4\n"
                  "out_dir = run\n"
                  "ledger_path = state/ledger.jsonl\n"
                  "fixture_dir = catalog\n"
                  "rate_per_minute = 30\n");
  PipelineConfig first = load_config(file);
  fs::path again = dir / "again.cfg";
  write_text_file(again, dump_config(first));
  PipelineConfig second = load_config(again);
  EXPECT_EQ(first, second);
  EXPECT_EQ(dump_config(first), dump_config(second));
  EXPECT_EQ(first.harvest.page_size, 40);
  EXPECT_EQ(first.rate_per_minute, 30);
}

TEST(Config, RelativePathsFollowTheFile) {
  PipelineConfig c = load_config(fixture("mock.cfg"));
  EXPECT_EQ(c.fixture_dir, (fixture("mock_catalog")).lexically_normal());
  EXPECT_EQ(c.out_dir, (fixture("mock_out")).lexically_normal());
  EXPECT_EQ(c.rate_per_minute, 0);
}

TEST(Config, MissingFileIsAConfigError) {
  EXPECT_THROW(load_config("/nonexistent/nbtrace.cfg"), ConfigError);
}

}  // namespace
}  // namespace nbtrace
