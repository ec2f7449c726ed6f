// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "chanclip/rng.hpp"
#include "chanclip/tensor.hpp"

namespace chanclip {

inline constexpr int kLeftToRight = 0;
inline constexpr int kRightToLeft = 1;

/// kTraverse keeps the square fully inside the frame for the whole clip and
/// makes a right-to-left clip the time reversal of a left-to-right one.
/// kWrap draws the start column uniformly and wraps around the frame edge.
enum class SynthMotion { kTraverse, kWrap };

/// Moving-square dataset parameters.
struct SynthConfig {
  std::size_t frames_per_clip = 12;
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t object_size = 8;
  std::uint8_t object_intensity = 200;
  std::uint8_t noise_max = 63;
  std::vector<std::size_t> speeds = {2, 3, 4};
  SynthMotion motion = SynthMotion::kTraverse;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthClip {
  std::vector<Frame> frames;
  int label = kLeftToRight;
  std::size_t row = 0;        // top row of the square
  std::size_t start_col = 0;  // left edge in frame 0
  std::size_t speed = 0;      // columns per frame
};

/// Left edge of the square in frame f, with wraparound.
std::size_t object_column(const SynthClip& clip, std::size_t width, std::size_t f);

/**
 * One clip of a white square sliding horizontally over fresh uniform noise.
 *
 * Draw order: row, speed, start column, then per-frame noise. Label 0 moves
 * right (+speed), label 1 moves left.
 *
 * kTraverse: a left edge `c` is drawn uniformly from
 * [0, width - object_size - speed * (frames - 1)]; label 0 starts at `c`,
 * label 1 starts at `c + speed * (frames - 1)`, so the square never touches
 * the border and the two labels differ only by the direction of time.
 * kWrap: the start column is uniform over [0, width - 1] and columns wrap
 * modulo width.
 */
SynthClip generate_clip(const SynthConfig& cfg, int label, Rng& rng);

/// Clip number `index` of the dataset: label index % 2, generator seeded
/// from (cfg.seed, index).
SynthClip generate_indexed_clip(const SynthConfig& cfg, std::size_t index);

/// Write 2 * n_per_class clips as PPM frame directories plus `manifest.csv`
/// under out_dir. Returns the manifest path. Output is independent of
/// `threads`.
std::filesystem::path generate_dataset(const SynthConfig& cfg, std::size_t n_per_class,
                                       const std::filesystem::path& out_dir,
                                       std::size_t threads = 1);

}  // namespace chanclip
