// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "chanclip/bench.hpp"

#include <algorithm>
#include <cstring>

#include "chanclip/error.hpp"

namespace chanclip {

namespace {

// Keeps the optimiser from dropping stores into `p`.
inline void clobber(void* p) { asm volatile("" : : "r"(p) : "memory"); }

template <typename Fn>
double bytes_per_second(std::size_t bytes, std::chrono::nanoseconds min_time, Fn&& fn) {
  using clock = std::chrono::steady_clock;
  std::size_t reps = 0;
  const auto start = clock::now();
  auto now = start;
  do {
    fn();
    ++reps;
    now = clock::now();
  } while (now - start < min_time);
  const double seconds = std::chrono::duration<double>(now - start).count();
  return static_cast<double>(bytes) * static_cast<double>(reps) / seconds;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  if (values.size() % 2 == 1) return values[mid];
  const double upper = values[mid];
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

GatherComparison compare_gather_to_copy(const ChannelIndexMap& map,
                                        std::span<const Frame> source_frames, std::size_t repeats,
                                        std::chrono::nanoseconds min_time) {
  if (repeats == 0) throw ArgumentError("repeats must be >= 1");
  if (source_frames.empty()) throw ArgumentError("no source frames to benchmark");
  GatherComparison result;
  result.output_bytes = map.t_out() * 3 * source_frames.front().pixel_count();
  std::vector<std::uint8_t> out(result.output_bytes);
  std::vector<std::uint8_t> copy_src(result.output_bytes, 0x5A);

  // Warm both buffers before timing.
  apply_into(map, source_frames, out);
  std::memcpy(out.data(), copy_src.data(), out.size());

  for (std::size_t r = 0; r < repeats; ++r) {
    result.gather_bytes_per_s.push_back(bytes_per_second(result.output_bytes, min_time, [&] {
      apply_into(map, source_frames, out);
      clobber(out.data());
    }));
    result.copy_bytes_per_s.push_back(bytes_per_second(result.output_bytes, min_time, [&] {
      std::memcpy(out.data(), copy_src.data(), out.size());
      clobber(out.data());
    }));
  }
  result.gather_median = median(result.gather_bytes_per_s);
  result.copy_median = median(result.copy_bytes_per_s);
  return result;
}

}  // namespace chanclip
