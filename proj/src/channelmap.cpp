// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "chanclip/channelmap.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <string>

#include "chanclip/error.hpp"
#include "gather_kernels.hpp"

namespace chanclip {

namespace {

// 1-based frame i -> 0-based entry.
ChannelSource at1(std::size_t frame1, std::uint8_t channel) {
  return {static_cast<std::uint32_t>(frame1 - 1), channel};
}

// Colour of 1-based output frame i: R if i mod 3 = 1, G if 2, B otherwise.
std::uint8_t cycle_channel(std::size_t i) { return static_cast<std::uint8_t>((i - 1) % 3); }

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::kRgb:
      return "RGB";
    case Strategy::kTc:
      return "TC";
    case Strategy::kTcPlus2:
      return "TC_PLUS2";
    case Strategy::kTcRgb:
      return "TC_RGB";
    case Strategy::kTcRed:
      return "TC_RED";
    case Strategy::kTcShortLong:
      return "TC_SHORTLONG";
    case Strategy::kGraySt:
      return "GRAY_ST";
    case Strategy::kGrayOnly:
      return "GRAY_ONLY";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto s : kAllStrategies) {
    if (upper == to_string(s)) return s;
  }
  throw ArgumentError("unknown strategy '" + std::string(name) + "'");
}

bool uses_grayscale(Strategy s) noexcept {
  return s == Strategy::kGraySt || s == Strategy::kGrayOnly;
}

std::size_t min_frames(Strategy s) noexcept { return s == Strategy::kTcShortLong ? 5 : 1; }

std::size_t required_source_frames(Strategy s, std::size_t t) {
  if (t == 0) throw ArgumentError("model frame count must be >= 1");
  switch (s) {
    case Strategy::kTcPlus2:
      return t + 2;
    case Strategy::kGraySt:
      return 3 * t;
    default:
      return t;
  }
}

ChannelIndexMap::ChannelIndexMap(std::size_t t_out, std::size_t source_frame_count,
                                 bool source_is_grayscale, std::vector<ChannelSource> entries)
    : t_out_(t_out),
      source_frame_count_(source_frame_count),
      source_is_grayscale_(source_is_grayscale),
      entries_(std::move(entries)) {
  if (entries_.size() != 3 * t_out_) throw ShapeError("index map needs 3 entries per frame");
  for (const auto& e : entries_) {
    if (e.frame >= source_frame_count_) throw BoundsError("index map frame out of range");
    if (source_is_grayscale_ ? e.channel != kGray : e.channel > kBlue) {
      throw BoundsError("index map channel out of range");
    }
  }
}

ChannelIndexMap build_index_map(Strategy s, std::size_t t) {
  if (t == 0) throw ArgumentError("model frame count must be >= 1");
  if (t < min_frames(s)) {
    throw UnsupportedError(std::string(to_string(s)) + " requires T >= " +
                           std::to_string(min_frames(s)));
  }
  std::vector<ChannelSource> e;
  e.reserve(3 * t);
  const auto clamp = [t](std::size_t i) { return std::min(i, t); };

  for (std::size_t i = 1; i <= t; ++i) {
    const auto c = cycle_channel(i);
    switch (s) {
      case Strategy::kRgb:
        e.insert(e.end(), {at1(i, kRed), at1(i, kGreen), at1(i, kBlue)});
        break;
      case Strategy::kTc:
        e.insert(e.end(), {at1(clamp(i), c), at1(clamp(i + 1), c), at1(clamp(i + 2), c)});
        break;
      case Strategy::kTcPlus2:
        e.insert(e.end(), {at1(i, c), at1(i + 1, c), at1(i + 2, c)});
        break;
      case Strategy::kTcRgb:
        e.insert(e.end(),
                 {at1(clamp(i), kRed), at1(clamp(i + 1), kGreen), at1(clamp(i + 2), kBlue)});
        break;
      case Strategy::kTcRed:
        e.insert(e.end(),
                 {at1(clamp(i), kRed), at1(clamp(i + 1), kRed), at1(clamp(i + 2), kRed)});
        break;
      case Strategy::kTcShortLong:
        // Last two frames look back with stride 2 instead of clamping.
        // At t = 5 the oldest lookback of frame t-1 would be frame 0; hold it at 1.
        if (i + 2 <= t) {
          e.insert(e.end(), {at1(i, c), at1(i + 1, c), at1(i + 2, c)});
        } else {
          e.insert(e.end(), {at1(std::max<std::size_t>(i - 4, 1), c), at1(i - 2, c), at1(i, c)});
        }
        break;
      case Strategy::kGraySt:
        e.insert(e.end(), {at1(3 * i - 2, kGray), at1(3 * i - 1, kGray), at1(3 * i, kGray)});
        break;
      case Strategy::kGrayOnly:
        e.insert(e.end(), {at1(i, kGray), at1(i, kGray), at1(i, kGray)});
        break;
    }
  }
  return ChannelIndexMap(t, required_source_frames(s, t), uses_grayscale(s), std::move(e));
}

void apply_into(const ChannelIndexMap& map, std::span<const Frame> source_frames,
                std::span<std::uint8_t> out) {
  if (source_frames.size() != map.source_frame_count()) {
    throw ShapeError("gather expects " + std::to_string(map.source_frame_count()) +
                     " source frames, got " + std::to_string(source_frames.size()));
  }
  const std::size_t want_channels = map.source_is_grayscale() ? 1 : 3;
  const Frame& first = source_frames.front();
  for (const auto& f : source_frames) {
    if (f.channels() != want_channels) {
      throw ShapeError("gather expects " + std::to_string(want_channels) +
                       "-channel source frames");
    }
    if (!f.same_shape(first)) throw ShapeError("source frames differ in shape");
  }
  const std::size_t plane = first.pixel_count();
  if (out.size() != map.t_out() * 3 * plane) throw ShapeError("gather output has wrong size");

  // Group destination planes by source frame so every source frame is read
  // once. The first destination of each (frame, channel) is filled from the
  // source; repeats (from clamping) are copied from that first plane.
  struct Target {
    std::uint8_t* first[3] = {nullptr, nullptr, nullptr};
    std::vector<std::pair<std::uint8_t, std::uint8_t*>> repeats;
  };
  std::vector<Target> targets(source_frames.size());
  for (std::size_t i = 0; i < map.t_out(); ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& src = map.source(i, k);
      std::uint8_t* dst = out.data() + (i * 3 + k) * plane;
      auto& t = targets[src.frame];
      if (t.first[src.channel] == nullptr) {
        t.first[src.channel] = dst;
      } else {
        t.repeats.emplace_back(src.channel, dst);
      }
    }
  }

  for (std::size_t f = 0; f < targets.size(); ++f) {
    const auto& t = targets[f];
    const std::uint8_t* src = source_frames[f].data().data();
    if (want_channels == 1) {
      if (t.first[kGray] != nullptr) std::memcpy(t.first[kGray], src, plane);
    } else if (t.first[0] != nullptr || t.first[1] != nullptr || t.first[2] != nullptr) {
      detail::deinterleave3(src, plane, t.first[0], t.first[1], t.first[2]);
    }
    for (const auto& [channel, dst] : t.repeats) std::memcpy(dst, t.first[channel], plane);
  }
}

ClipU8 apply(const ChannelIndexMap& map, std::span<const Frame> source_frames) {
  if (source_frames.empty()) throw ShapeError("gather needs source frames");
  const auto& f = source_frames.front();
  ClipU8 clip(map.t_out(), 3, f.height(), f.width());
  apply_into(map, source_frames, clip.data());
  return clip;
}

std::vector<std::vector<Frame>> prepare_source_frames(std::size_t n, const FrameFetcher& fetch,
                                                      Strategy strategy, const SampleSpec& spec,
                                                      const std::optional<SpatialSpec>& spatial,
                                                      Rng& rng) {
  const std::size_t count = required_source_frames(strategy, spec.frames);
  const bool gray = uses_grayscale(strategy);
  const auto indices = sparse_indices(n, count, spec.mode, rng);

  // Clamped sampling repeats indices; decode each distinct frame once.
  std::map<std::size_t, Frame> decoded;
  std::vector<Frame> frames;
  frames.reserve(indices.size());
  for (auto idx : indices) {
    auto it = decoded.find(idx);
    if (it == decoded.end()) {
      Frame f = fetch(idx);
      if (gray) {
        if (f.channels() == 3) f = to_grayscale(f);
      } else if (f.channels() != 3) {
        throw ShapeError(std::string(to_string(strategy)) + " needs colour source frames");
      }
      it = decoded.emplace(idx, std::move(f)).first;
    }
    frames.push_back(it->second);
  }

  std::vector<std::vector<Frame>> views;
  if (!spatial) {
    views.push_back(std::move(frames));
    return views;
  }
  auto processed = spatial_pipeline(frames, *spatial, rng);
  const std::size_t per_view = frames.size();
  for (std::size_t v = 0; v * per_view < processed.size(); ++v) {
    views.emplace_back(std::make_move_iterator(processed.begin() + static_cast<std::ptrdiff_t>(v * per_view)),
                       std::make_move_iterator(processed.begin() + static_cast<std::ptrdiff_t>((v + 1) * per_view)));
  }
  return views;
}

std::vector<ClipU8> transform_frames(std::size_t n, const FrameFetcher& fetch, Strategy strategy,
                                     const SampleSpec& spec,
                                     const std::optional<SpatialSpec>& spatial, Rng& rng) {
  const auto map = build_index_map(strategy, spec.frames);
  const auto views = prepare_source_frames(n, fetch, strategy, spec, spatial, rng);
  std::vector<ClipU8> clips;
  clips.reserve(views.size());
  for (const auto& frames : views) clips.push_back(chanclip::apply(map, frames));
  return clips;
}

std::vector<ClipU8> transform_clip_views(const VideoSource& source, Strategy strategy,
                                         const SampleSpec& spec,
                                         const std::optional<SpatialSpec>& spatial, Rng& rng) {
  if (source.frame_paths.empty()) throw EmptySourceError("clip " + source.id + " has no frames");
  return transform_frames(
      source.frame_count(), [&](std::size_t i) { return load_frame(source.frame_paths[i]); },
      strategy, spec, spatial, rng);
}

ClipU8 transform_clip(const VideoSource& source, Strategy strategy, const SampleSpec& spec,
                      const std::optional<SpatialSpec>& spatial, Rng& rng) {
  if (spatial && spatial->mode == CropMode::kFiveCropFlip) {
    throw ArgumentError("five-crop mode yields 10 views; use transform_clip_views");
  }
  return std::move(transform_clip_views(source, strategy, spec, spatial, rng).front());
}

}  // namespace chanclip
