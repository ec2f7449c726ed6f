// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "chanclip/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "chanclip/error.hpp"

namespace chanclip {

std::size_t resolve_threads(std::optional<std::size_t> requested) {
  if (requested) return std::max<std::size_t>(*requested, 1);
  if (const char* env = std::getenv("CHANCLIP_THREADS"); env != nullptr && *env != '\0') {
    std::size_t v = 0;
    const auto* end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc() || ptr != end || v == 0) {
      throw ArgumentError("CHANCLIP_THREADS must be a positive integer");
    }
    return v;
  }
  return 1;
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace chanclip
