// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chanclip::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `chanclip` tool. args[0] is the program name.
/// Returns 0 on success, 1 on runtime failure, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chanclip::cli
