// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include <iostream>

#include "nbtrace/cli.hpp"

int main(int argc, char** argv) { return nbtrace::cli::run(argc, argv, std::cout, std::cerr); }
