// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "nbtrace/cli.hpp"

namespace nbtrace::cli {
namespace {

namespace fs = std::filesystem;
using testing::fixture;
using testing::slurp;
using testing::TempDir;

struct Invocation {
  int status;
  std::string out;
  std::string err;
};

Invocation nbtrace(std::vector<std::string> args) {
  args.insert(args.begin(), "nbtrace");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int status = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

TEST(Cli, ConvertWritesTheGoldenTrace) {
  TempDir dir;
  Invocation r = nbtrace({"convert", fixture("notebooks/head_only.ipynb").string(), "--out", dir.path().string()});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(slurp(dir / "traces/head_only.trace.json"), slurp(fs::path(NBTRACE_GOLDEN) / "head_only.trace.json"));
}

TEST(Cli, ConvertSurvivesBrokenNotebooks) {
  TempDir dir;
  Invocation r = nbtrace({"convert", fixture("robustness").string(), "--out", dir.path().string()});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  // corrupt.ipynb and the R notebook are skipped; everything else gets a trace.
  std::size_t traces = 0;
  for (const auto& e : fs::directory_iterator(dir / "traces")) traces += e.path().extension() == ".json" &&
                                                                         e.path().filename() != "index.json";
  EXPECT_EQ(traces, 6u);
  EXPECT_NE(slurp(dir / "diagnostics.jsonl").find("corrupt.ipynb"), std::string::npos);
}

TEST(Cli, ReportOnEmptyDirectory) {
  TempDir dir;
  fs::create_directories(dir / "traces");
  Invocation r = nbtrace({"report", "--traces", (dir / "traces").string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(slurp(dir / "out/summary.csv"),
            "dataset_name,notebook_ref,snippet_cell_number,operation_type,prev_df,new_df,transform_arg_kind,"
            "transform_arg_source\n");
}

TEST(Cli, PipelineOnMockCatalog) {
  TempDir dir;
  Invocation r = nbtrace({"pipeline", "--config", fixture("mock.cfg").string(), "--out", dir.path().string()});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  auto stats = nlohmann::json::parse(slurp(dir / "stats.json"));
  // By hand: dan/titanic-eda, gus/titanic-clean and hal/house-dates pass every filter.
  EXPECT_EQ(stats["notebooks_processed"], 3);
  EXPECT_TRUE(fs::exists(dir / "alice/titanic/dan/titanic-eda.ipynb"));
  EXPECT_FALSE(fs::exists(dir / "bob"));

  // A second run finds everything in the ledger and fetches nothing new.
  Invocation again = nbtrace({"pipeline", "--config", fixture("mock.cfg").string(), "--out", dir.path().string()});
  ASSERT_EQ(again.status, kExitOk) << again.err;
  EXPECT_EQ(again.out.rfind("fetched 0 notebooks", 0), 0u) << again.out;
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "stats.json"))["notebooks_processed"], 3);
}

TEST(Cli, HarvestOnly) {
  TempDir dir;
  Invocation r = nbtrace({"harvest", "--config", fixture("mock.cfg").string(), "--out", dir.path().string()});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("fetched 3 notebooks from 2 datasets", 0), 0u) << r.out;
  EXPECT_TRUE(fs::exists(dir / "ledger.jsonl"));
}

TEST(Cli, AnalyzeTerm) {
  Invocation r = nbtrace({"analyze-term", "--notebook", fixture("notebooks/roles.ipynb").string(), "--term", "clean_fare",
                   "--term", "halve", "--term", "sex_map"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  std::size_t fn = r.out.find("Function definition:\ndef clean_fare(x):");
  std::size_t lam = r.out.find("Lambda function:\n");
  std::size_t map = r.out.find("'sex_map' is a variable with value: {'male': 0, 'female': 1}");
  ASSERT_NE(fn, std::string::npos) << r.out;
  ASSERT_NE(lam, std::string::npos) << r.out;
  ASSERT_NE(map, std::string::npos) << r.out;
  EXPECT_LT(fn, lam);
  EXPECT_LT(lam, map);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(nbtrace({}).status, kExitUsage);
  EXPECT_EQ(nbtrace({"frobnicate"}).status, kExitUsage);
  EXPECT_EQ(nbtrace({"convert"}).status, kExitUsage);
  EXPECT_EQ(nbtrace({"report", "--traces", "/nonexistent/dir", "--out", "x"}).status, kExitUsage);
  EXPECT_EQ(nbtrace({"--help"}).status, kExitOk);
}

TEST(Cli, ConfigErrorIsAUsageError) {
  TempDir dir;
  fs::path cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "max_pages = -1\n";
  Invocation r = nbtrace({"harvest", "--config", cfg.string()});
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_NE(r.err.find("max_pages"), std::string::npos);
}

TEST(Cli, MissingFixtureDirIsAConfigError) {
  TempDir dir;
  fs::path cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "fixture_dir = nowhere\n";
  EXPECT_EQ(nbtrace({"harvest", "--config", cfg.string()}).status, kExitUsage);
}

}  // namespace
}  // namespace nbtrace::cli
