// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "chanclip/rng.hpp"

namespace chanclip {

enum class SampleMode { kTrain, kTest };

SampleMode parse_sample_mode(std::string_view name);
std::string_view to_string(SampleMode mode) noexcept;

/// Temporal sampling request for one clip.
struct SampleSpec {
  std::size_t frames = 8;  // model frame count T
  SampleMode mode = SampleMode::kTest;
  std::uint64_t seed = 0;
};

/**
 * Sparse segment sampling.
 *
 * The n available frames are split into k segments; segment s covers
 * [floor(s*n/k), floor((s+1)*n/k) - 1]. Train mode draws uniformly inside the
 * segment, test mode takes floor(start + (len-1)/2). An empty segment (only
 * possible when n < k) yields its start index, which is always < n, so the
 * output always has k non-decreasing entries.
 */
std::vector<std::size_t> sparse_indices(std::size_t n, std::size_t k, SampleMode mode, Rng& rng);

/// Fixed-stride window of k indices for temporal clip `clip_index` of
/// `num_clips` evenly spaced windows; indices past the end clamp to n-1.
std::vector<std::size_t> dense_indices(std::size_t n, std::size_t k, std::size_t stride,
                                       std::size_t clip_index, std::size_t num_clips);

enum class SpatialViews { kOneCenter, kThreeCrops, kTenCrops };

std::size_t view_count(SpatialViews views) noexcept;

struct TestView {
  std::size_t clip_index;
  std::size_t crop_index;  // 0 for one_center; [start, center, end]; or five-crop+flip order

  friend bool operator==(const TestView&, const TestView&) = default;
};

/// Temporal-major cartesian product of temporal clips and spatial crops.
std::vector<TestView> test_clip_plan(std::size_t num_temporal, SpatialViews views);

}  // namespace chanclip
