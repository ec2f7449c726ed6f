// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

#include "chanclip/channelmap.hpp"

namespace chanclip {

/// Median of a non-empty sample (mean of the middle pair for even sizes).
double median(std::vector<double> values);

struct GatherComparison {
  std::size_t output_bytes = 0;
  std::vector<double> gather_bytes_per_s;  // one entry per repeat
  std::vector<double> copy_bytes_per_s;
  double gather_median = 0.0;
  double copy_median = 0.0;

  double ratio() const noexcept { return copy_median > 0.0 ? gather_median / copy_median : 0.0; }
};

/**
 * Time apply_into() against a plain memcpy of the same output size.
 *
 * Each repeat runs both kernels back to back, each for at least `min_time`,
 * and records bytes per second. Medians are taken over repeats.
 */
GatherComparison compare_gather_to_copy(const ChannelIndexMap& map,
                                        std::span<const Frame> source_frames,
                                        std::size_t repeats,
                                        std::chrono::nanoseconds min_time = std::chrono::milliseconds(50));

}  // namespace chanclip
