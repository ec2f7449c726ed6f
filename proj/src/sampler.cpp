// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "chanclip/sampler.hpp"

#include <algorithm>
#include <string>

#include "chanclip/error.hpp"

namespace chanclip {

SampleMode parse_sample_mode(std::string_view name) {
  if (name == "train") return SampleMode::kTrain;
  if (name == "test") return SampleMode::kTest;
  throw ArgumentError("unknown sample mode '" + std::string(name) + "' (expected train|test)");
}

std::string_view to_string(SampleMode mode) noexcept {
  return mode == SampleMode::kTrain ? "train" : "test";
}

std::vector<std::size_t> sparse_indices(std::size_t n, std::size_t k, SampleMode mode, Rng& rng) {
  if (n == 0 || k == 0) throw ArgumentError("sparse_indices needs n >= 1 and k >= 1");
  std::vector<std::size_t> out(k);
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t start = s * n / k;
    const std::size_t next = (s + 1) * n / k;
    if (next <= start) {
      out[s] = start;
      continue;
    }
    const std::size_t len = next - start;
    out[s] = mode == SampleMode::kTrain
                 ? static_cast<std::size_t>(rng.uniform(start, next - 1))
                 : start + (len - 1) / 2;
  }
  return out;
}

std::vector<std::size_t> dense_indices(std::size_t n, std::size_t k, std::size_t stride,
                                       std::size_t clip_index, std::size_t num_clips) {
  if (n == 0 || k == 0) throw ArgumentError("dense_indices needs n >= 1 and k >= 1");
  if (stride == 0) throw ArgumentError("dense_indices needs stride >= 1");
  if (clip_index >= num_clips) {
    throw ArgumentError("clip_index " + std::to_string(clip_index) + " out of range for " +
                        std::to_string(num_clips) + " clips");
  }
  const std::size_t window = (k - 1) * stride + 1;
  const std::size_t slack = n > window ? n - window : 0;
  const std::size_t gaps = std::max<std::size_t>(num_clips - 1, 1);
  // round half up of clip_index * slack / gaps
  const std::size_t start = (2 * clip_index * slack + gaps) / (2 * gaps);
  std::vector<std::size_t> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = std::min(start + j * stride, n - 1);
  return out;
}

std::size_t view_count(SpatialViews views) noexcept {
  switch (views) {
    case SpatialViews::kOneCenter:
      return 1;
    case SpatialViews::kThreeCrops:
      return 3;
    case SpatialViews::kTenCrops:
      return 10;
  }
  return 1;
}

std::vector<TestView> test_clip_plan(std::size_t num_temporal, SpatialViews views) {
  if (num_temporal == 0) throw ArgumentError("test_clip_plan needs num_temporal >= 1");
  std::vector<TestView> plan;
  const std::size_t crops = view_count(views);
  plan.reserve(num_temporal * crops);
  for (std::size_t t = 0; t < num_temporal; ++t) {
    for (std::size_t c = 0; c < crops; ++c) plan.push_back({t, c});
  }
  return plan;
}

}  // namespace chanclip
