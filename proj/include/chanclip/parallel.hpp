// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace chanclip {

/// Thread count: explicit value, else CHANCLIP_THREADS, else 1.
std::size_t resolve_threads(std::optional<std::size_t> requested);

/**
 * Run body(i) for i in [0, n) on up to `threads` workers.
 *
 * Work items are claimed dynamically, so callers must write results by index
 * rather than in completion order. The first exception thrown by any item is
 * rethrown after all workers have stopped.
 */
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace chanclip
