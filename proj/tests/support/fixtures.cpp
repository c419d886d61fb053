// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace nbtrace::testing {

namespace fs = std::filesystem;

fs::path fixture(std::string_view relative) { return fs::path(NBTRACE_FIXTURES) / relative; }

std::vector<fs::path> corpus_notebooks() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fixture("corpus"))) {
    if (e.path().extension() == ".ipynb") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  fs::path base = fs::temp_directory_path();
  for (;;) {
    fs::path p = base / ("nbtrace-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<std::pair<std::string, std::string>> tree_contents(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), dir).generic_string(), slurp(e.path()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nbtrace::testing
