// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chanclip/rng.hpp"
#include "chanclip/tensor.hpp"

namespace chanclip {

/// One manifest line: `clip_id,relative_dir,label` (label optional).
struct ManifestRecord {
  std::string clip_id;
  std::filesystem::path relative_dir;
  std::optional<int> label;
};

/// Parse a manifest file. Relative directories are kept relative; resolve
/// them against the manifest's parent directory. A first line starting with
/// `clip_id,` is treated as a header and skipped.
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& manifest);
std::vector<ManifestRecord> parse_manifest(std::string_view text);
void write_manifest(const std::filesystem::path& manifest,
                    std::span<const ManifestRecord> records);

/// A frame-directory video.
struct VideoSource {
  std::string id;
  std::vector<std::filesystem::path> frame_paths;  // sorted by filename
  std::optional<int> label;

  std::size_t frame_count() const noexcept { return frame_paths.size(); }
};

/// List the `.ppm`/`.pgm` files in `dir`, sorted lexicographically by name.
/// With a manifest record, id and label come from it; otherwise the id is
/// the directory name.
VideoSource open_frame_dir(const std::filesystem::path& dir,
                           const std::optional<ManifestRecord>& record = std::nullopt);

/// Open every clip listed in a manifest.
std::vector<VideoSource> open_manifest(const std::filesystem::path& manifest);

/// Binary PPM (P6) or PGM (P5) with maxval 255.
Frame decode_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_ppm(const Frame& frame);
Frame load_frame(const std::filesystem::path& path);
void save_frame(const Frame& frame, const std::filesystem::path& path);

/// BT.601 luma, y = round_half_up(0.299 R + 0.587 G + 0.114 B).
Frame to_grayscale(const Frame& frame);

/// Bilinear resize with half-pixel-centred sampling so the shorter side
/// becomes `target`; the other side is rounded to nearest (minimum 1).
Frame resize_shorter_side(const Frame& frame, std::size_t target);
Frame resize(const Frame& frame, std::size_t out_height, std::size_t out_width);

/// size x size window with top-left corner at (top, left).
Frame crop(const Frame& frame, std::size_t top, std::size_t left, std::size_t size);
Frame hflip(const Frame& frame);

/// [top-left, top-right, bottom-left, bottom-right, center] followed by the
/// horizontal flip of each, in that order.
std::vector<Frame> five_crops_with_flips(const Frame& frame, std::size_t size);

/// [start, center, end] along the longer spatial axis, centred on the other.
std::vector<Frame> three_crops(const Frame& frame, std::size_t size);

enum class CropMode { kRandomCrop, kCenterCrop, kFiveCropFlip };

struct SpatialSpec {
  std::size_t resize_shorter_min = 256;
  std::size_t resize_shorter_max = 256;
  std::size_t crop_size = 224;
  CropMode mode = CropMode::kCenterCrop;

  /// Throws ArgumentError when the invariants do not hold.
  void validate() const;
};

struct CropWindow {
  std::size_t resize_target = 0;
  std::size_t top = 0;
  std::size_t left = 0;
};

/// Draw the per-clip resize target and crop window for a frame of the given
/// size. Center and five-crop modes use resize_shorter_min and consume no
/// randomness.
CropWindow draw_crop_window(std::size_t height, std::size_t width, const SpatialSpec& spec,
                            Rng& rng);

/**
 * Resize and crop every frame of one clip with a single transform.
 *
 * One resize target and one crop window are drawn for the whole clip, so all
 * frames stay pixel-aligned. For kFiveCropFlip the result holds 10 views,
 * view-major: all frames of view 0, then all frames of view 1, and so on.
 */
std::vector<Frame> spatial_pipeline(std::span<const Frame> frames, const SpatialSpec& spec,
                                    Rng& rng);

}  // namespace chanclip
