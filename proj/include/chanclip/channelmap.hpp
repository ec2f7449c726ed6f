// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "chanclip/ingest.hpp"
#include "chanclip/rng.hpp"
#include "chanclip/sampler.hpp"
#include "chanclip/tensor.hpp"

namespace chanclip {

/// Channel sampling strategies.
///
///   kRgb         plain frames, channels intact
///   kTc          time-colour reordering: one colour channel of three
///                consecutive frames, colour cycling R,G,B over output frames;
///                reads past the last frame clamp to it
///   kTcPlus2     kTc over T+2 source frames, no clamping needed
///   kTcRgb       consecutive frames, channels R,G,B in order
///   kTcRed       consecutive frames, red channel only
///   kTcShortLong kTc with the last two output frames using stride-2 lookback
///   kGraySt      three consecutive grayscale frames per output frame (3T in)
///   kGrayOnly    one grayscale frame replicated into all three channels
enum class Strategy : std::uint8_t {
  kRgb,
  kTc,
  kTcPlus2,
  kTcRgb,
  kTcRed,
  kTcShortLong,
  kGraySt,
  kGrayOnly,
};

inline constexpr std::array<Strategy, 8> kAllStrategies = {
    Strategy::kRgb,   Strategy::kTc,          Strategy::kTcPlus2, Strategy::kTcRgb,
    Strategy::kTcRed, Strategy::kTcShortLong, Strategy::kGraySt,  Strategy::kGrayOnly,
};

/// Upper-case tag, e.g. "TC_PLUS2".
std::string_view to_string(Strategy s) noexcept;
/// Accepts the tag in any letter case; ArgumentError otherwise.
Strategy parse_strategy(std::string_view name);

bool uses_grayscale(Strategy s) noexcept;

/// Smallest T the strategy is defined for.
std::size_t min_frames(Strategy s) noexcept;

/// Number of sampled source frames: T, T+2 (kTcPlus2) or 3T (kGraySt).
std::size_t required_source_frames(Strategy s, std::size_t t);

inline constexpr std::uint8_t kRed = 0;
inline constexpr std::uint8_t kGreen = 1;
inline constexpr std::uint8_t kBlue = 2;
inline constexpr std::uint8_t kGray = 0;

/// One (source frame, source channel) pair; frame index is 0-based.
struct ChannelSource {
  std::uint32_t frame;
  std::uint8_t channel;

  friend bool operator==(const ChannelSource&, const ChannelSource&) = default;
};

/// Output channel k of output frame i is a copy of source(i, k).
class ChannelIndexMap {
 public:
  ChannelIndexMap(std::size_t t_out, std::size_t source_frame_count, bool source_is_grayscale,
                  std::vector<ChannelSource> entries);

  std::size_t t_out() const noexcept { return t_out_; }
  std::size_t source_frame_count() const noexcept { return source_frame_count_; }
  bool source_is_grayscale() const noexcept { return source_is_grayscale_; }
  std::span<const ChannelSource> entries() const noexcept { return entries_; }

  const ChannelSource& source(std::size_t frame, std::size_t channel) const {
    return entries_[frame * 3 + channel];
  }

  friend bool operator==(const ChannelIndexMap&, const ChannelIndexMap&) = default;

 private:
  std::size_t t_out_;
  std::size_t source_frame_count_;
  bool source_is_grayscale_;
  std::vector<ChannelSource> entries_;
};

/// Index map for `s` with T = t output frames. UnsupportedError when t is
/// below min_frames(s).
ChannelIndexMap build_index_map(Strategy s, std::size_t t);

/// Gather into a fresh [T, 3, H, W] clip. Pure byte copies.
ClipU8 apply(const ChannelIndexMap& map, std::span<const Frame> source_frames);

/// Gather into `out`, which must hold T*3*H*W bytes.
void apply_into(const ChannelIndexMap& map, std::span<const Frame> source_frames,
                std::span<std::uint8_t> out);

/// Fetches decoded source frame i (0 <= i < n).
using FrameFetcher = std::function<Frame(std::size_t)>;

/**
 * Everything before the gather: sparse sampling -> fetch -> grayscale (if the
 * strategy needs it) -> spatial. Returns one frame list per spatial view,
 * each of length build_index_map(strategy, spec.frames).source_frame_count().
 */
std::vector<std::vector<Frame>> prepare_source_frames(std::size_t n, const FrameFetcher& fetch,
                                                      Strategy strategy, const SampleSpec& spec,
                                                      const std::optional<SpatialSpec>& spatial,
                                                      Rng& rng);

/**
 * Full per-clip pipeline over an abstract frame store:
 * sparse sampling -> fetch -> grayscale (if needed) -> spatial -> gather.
 *
 * `spatial` = nullopt keeps frames at native size. Returns one clip per
 * spatial view (10 for kFiveCropFlip, otherwise 1).
 */
std::vector<ClipU8> transform_frames(std::size_t n, const FrameFetcher& fetch, Strategy strategy,
                                     const SampleSpec& spec,
                                     const std::optional<SpatialSpec>& spatial, Rng& rng);

/// transform_frames over a frame directory. Rejects kFiveCropFlip; use
/// transform_clip_views for that.
ClipU8 transform_clip(const VideoSource& source, Strategy strategy, const SampleSpec& spec,
                      const std::optional<SpatialSpec>& spatial, Rng& rng);

std::vector<ClipU8> transform_clip_views(const VideoSource& source, Strategy strategy,
                                         const SampleSpec& spec,
                                         const std::optional<SpatialSpec>& spatial, Rng& rng);

}  // namespace chanclip
