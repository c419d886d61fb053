// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#pragma once

#include <iosfwd>

namespace nbtrace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `nbtrace` tool. Subcommands: harvest, convert,
/// analyze-term, report, pipeline.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nbtrace::cli
