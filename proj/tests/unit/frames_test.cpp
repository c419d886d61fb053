// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include <gtest/gtest.h>

#include "nbtrace/frames.hpp"
#include "nbtrace/imports.hpp"
#include "nbtrace/lineage.hpp"
#include "nbtrace/syntax.hpp"

namespace nbtrace {
namespace {

using syntax::parse_expression;
using syntax::parse_module;

class FramesTest : public ::testing::Test {
 protected:
  void SetUp() override { collect_imports(parse_module("import pandas as pd\nimport numpy as np"), 0, table); }

  void seed(std::string_view src, int cell = 0) {
    for (const auto& s : parse_module(src).statements) seed_frames(*s, table, state, cell);
  }
  FrameRefs refs(std::string_view src, bool with_table = false) {
    return detect_frame_refs(*parse_module(src).statements.at(0), state, with_table ? &table : nullptr);
  }

  ImportTable table;
  FrameState state;
};

using Names = std::vector<std::string>;

TEST_F(FramesTest, ReaderCreatesFrameWithDataset) {
  seed("df = pd.read_csv('train.csv')", 2);
  const FrameInfo* f = state.find("df");
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->source_dataset, "train.csv");
  EXPECT_EQ(f->creation_cell, 2);
  EXPECT_EQ(f->last_modified_cell, 2);
  EXPECT_EQ(f->derived_from, std::nullopt);
}

TEST_F(FramesTest, NonFrameAssignmentLeavesStateAlone) {
  seed("x = 1");
  EXPECT_TRUE(state.empty());
}

TEST_F(FramesTest, CopyDerivesFromSource) {
  seed("df = pd.read_csv('train.csv')");
  seed("df2 = df.copy()", 1);
  const FrameInfo* f = state.find("df2");
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->derived_from, "df");
  EXPECT_EQ(f->creation_cell, 1);
}

TEST_F(FramesTest, OtherReadersAndImportStyles) {
  seed("a = pd.read_excel('a.xlsx')\nb = pd.read_json('b.json')\nc = pd.read_parquet('c.parquet')\n"
       "d = pd.DataFrame({'x': [1]})");
  for (const char* n : {"a", "b", "c", "d"}) EXPECT_TRUE(state.contains(n)) << n;
  EXPECT_EQ(state.find("d")->source_dataset, std::nullopt);

  ImportTable other;
  collect_imports(parse_module("from pandas import read_csv"), 0, other);
  FrameState s;
  seed_frames(*parse_module("t = read_csv('t.csv')").statements[0], other, s, 0);
  EXPECT_TRUE(s.contains("t"));

  // A reader from an unrelated module is not a frame source.
  FrameState u;
  ImportTable polars;
  collect_imports(parse_module("import polars as pd"), 0, polars);
  seed_frames(*parse_module("t = pd.read_csv('t.csv')").statements[0], polars, u, 0);
  EXPECT_FALSE(u.contains("t"));
}

TEST_F(FramesTest, RebindingToNonFrameDropsIt) {
  seed("df = pd.read_csv('a.csv')\ndf = 3");
  EXPECT_FALSE(state.contains("df"));
}

TEST_F(FramesTest, ScalarResultsAreNotFrames) {
  seed("df = pd.read_csv('a.csv')\nm = df['Age'].mean()\nn = len(df)\ncols = df.columns\ns = df.shape");
  EXPECT_FALSE(state.contains("m"));
  EXPECT_FALSE(state.contains("n"));
  EXPECT_FALSE(state.contains("s"));
}

TEST_F(FramesTest, GroupedAggregatesAreFrames) {
  seed("df = pd.read_csv('a.csv')\ng = df.groupby('k')['v'].sum()");
  ASSERT_TRUE(state.contains("g"));
  EXPECT_EQ(state.find("g")->derived_from, "df");
}

TEST_F(FramesTest, TupleUnpackDerivesEachTarget) {
  seed("df = pd.read_csv('a.csv')\na, b = train_test_split(df)");
  EXPECT_TRUE(state.contains("a"));
  EXPECT_TRUE(state.contains("b"));
}

TEST_F(FramesTest, DetectRefsExamples) {
  seed("df = pd.read_csv('a.csv')");
  FrameRefs r = refs("df['age'] = df['age'].fillna(0)");
  EXPECT_EQ(r.reads, Names{"df"});
  EXPECT_EQ(r.writes, Names{"df"});

  r = refs("df.head(3)");
  EXPECT_EQ(r.reads, Names{"df"});
  EXPECT_TRUE(r.writes.empty());

  r = refs("print(1)");
  EXPECT_TRUE(r.reads.empty());
  EXPECT_TRUE(r.writes.empty());
}

TEST_F(FramesTest, DetectRefsWriteForms) {
  seed("df = pd.read_csv('a.csv')\nother = pd.read_csv('b.csv')");
  EXPECT_EQ(refs("df.drop(columns=['a'], inplace=True)").writes, Names{"df"});
  EXPECT_TRUE(refs("df.drop(columns=['a'], inplace=False)").writes.empty());
  EXPECT_EQ(refs("df.loc[df['a'] > 0, 'b'] = 1").writes, Names{"df"});
  EXPECT_EQ(refs("df.columns = ['x']").writes, Names{"df"});
  EXPECT_EQ(refs("df['x'] += 1").writes, Names{"df"});
  FrameRefs m = refs("df = df.merge(other, on='k')");
  EXPECT_EQ(m.reads, (Names{"df", "other"}));
  EXPECT_EQ(m.writes, Names{"df"});
  // A fresh name bound to a frame value counts as a write once the table is known.
  EXPECT_TRUE(refs("fresh = df.copy()").writes.empty());
  EXPECT_EQ(refs("fresh = df.copy()", true).writes, Names{"fresh"});
}

TEST_F(FramesTest, RootFrame) {
  seed("df = pd.read_csv('a.csv')");
  EXPECT_EQ(root_frame(*parse_expression("df['a'].str.lower()"), state), "df");
  EXPECT_EQ(root_frame(*parse_expression("df.loc[m, 'b']"), state), "df");
  EXPECT_EQ(root_frame(*parse_expression("x['a']"), state), std::nullopt);
  FrameState keyed;
  keyed.create("dfs['train']", FrameInfo{});
  EXPECT_EQ(root_frame(*parse_expression("dfs['train']['a']"), keyed), "dfs['train']");
}

TEST(ReaderPaths, Membership) {
  EXPECT_TRUE(is_reader_path("pandas.read_csv"));
  EXPECT_TRUE(is_reader_path("pandas.DataFrame"));
  EXPECT_FALSE(is_reader_path("pandas.to_datetime"));
  EXPECT_FALSE(is_reader_path("polars.read_csv"));
}

}  // namespace
}  // namespace nbtrace
