// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nbtrace::testing {

std::filesystem::path fixture(std::string_view relative);

/// Sorted `.ipynb` files of the taxonomy corpus.
std::vector<std::filesystem::path> corpus_notebooks();

std::string slurp(const std::filesystem::path& file);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view child) const { return path_ / child; }

 private:
  std::filesystem::path path_;
};

/// Every file below `dir` as (relative path, bytes), sorted.
std::vector<std::pair<std::string, std::string>> tree_contents(const std::filesystem::path& dir);

}  // namespace nbtrace::testing
