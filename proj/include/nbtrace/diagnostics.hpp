// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace nbtrace {

// Categories written to diagnostics.jsonl.
namespace diag {
inline constexpr const char* kMagicDropped = "magic_dropped";
inline constexpr const char* kSyntaxError = "syntax_error";
inline constexpr const char* kLoopBody = "loop_body";
inline constexpr const char* kStarImport = "star_import";
inline constexpr const char* kMalformedNotebook = "malformed_notebook";
inline constexpr const char* kUnsupportedKernel = "unsupported_kernel";
inline constexpr const char* kMissingArgument = "missing_argument";
inline constexpr const char* kChainedCall = "chained_call";
inline constexpr const char* kIoFailure = "io_failure";
}  // namespace diag

struct Diagnostic {
  std::string notebook_ref;
  std::optional<int> cell;
  std::string category;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace nbtrace
