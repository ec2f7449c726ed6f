// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "chanclip/synth.hpp"

#include <cstdio>
#include <string>

#include "chanclip/error.hpp"
#include "chanclip/ingest.hpp"
#include "chanclip/parallel.hpp"

namespace chanclip {

namespace fs = std::filesystem;

namespace {

std::string numbered(const char* fmt, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, fmt, i);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (frames_per_clip == 0 || height == 0 || width == 0) {
    throw ArgumentError("synth frame geometry must be positive");
  }
  if (object_size == 0 || object_size >= width || object_size > height) {
    throw ArgumentError("synth object_size must be in [1, width) and <= height");
  }
  if (object_intensity <= noise_max) throw ArgumentError("object_intensity must exceed noise_max");
  if (speeds.empty()) throw ArgumentError("synth speeds must not be empty");
  for (auto v : speeds) {
    if (v == 0) throw ArgumentError("synth speeds must be positive");
    if (motion == SynthMotion::kTraverse && object_size + v * (frames_per_clip - 1) > width) {
      throw ArgumentError("speed " + std::to_string(v) + " leaves the frame within one clip");
    }
  }
}

std::size_t object_column(const SynthClip& clip, std::size_t width, std::size_t f) {
  const std::size_t shift = (clip.speed * f) % width;
  return clip.label == kLeftToRight ? (clip.start_col + shift) % width
                                    : (clip.start_col + width - shift) % width;
}

SynthClip generate_clip(const SynthConfig& cfg, int label, Rng& rng) {
  cfg.validate();
  if (label != kLeftToRight && label != kRightToLeft) throw ArgumentError("synth label must be 0 or 1");

  SynthClip clip;
  clip.label = label;
  clip.row = static_cast<std::size_t>(rng.uniform(0, cfg.height - cfg.object_size));
  clip.speed = cfg.speeds[rng.uniform(0, cfg.speeds.size() - 1)];
  if (cfg.motion == SynthMotion::kWrap) {
    clip.start_col = static_cast<std::size_t>(rng.uniform(0, cfg.width - 1));
  } else {
    const std::size_t travel = clip.speed * (cfg.frames_per_clip - 1);
    clip.start_col = static_cast<std::size_t>(rng.uniform(0, cfg.width - cfg.object_size - travel));
    if (label == kRightToLeft) clip.start_col += travel;
  }

  clip.frames.reserve(cfg.frames_per_clip);
  for (std::size_t f = 0; f < cfg.frames_per_clip; ++f) {
    Frame frame(cfg.height, cfg.width, 3);
    for (auto& v : frame.data()) v = static_cast<std::uint8_t>(rng.uniform(0, cfg.noise_max));
    const std::size_t col = object_column(clip, cfg.width, f);
    for (std::size_t y = clip.row; y < clip.row + cfg.object_size; ++y) {
      for (std::size_t j = 0; j < cfg.object_size; ++j) {
        const std::size_t x = (col + j) % cfg.width;
        for (std::size_t c = 0; c < 3; ++c) frame.at(y, x, c) = cfg.object_intensity;
      }
    }
    clip.frames.push_back(std::move(frame));
  }
  return clip;
}

SynthClip generate_indexed_clip(const SynthConfig& cfg, std::size_t index) {
  Rng rng(derive_seed(cfg.seed, index));
  return generate_clip(cfg, static_cast<int>(index % 2), rng);
}

fs::path generate_dataset(const SynthConfig& cfg, std::size_t n_per_class, const fs::path& out_dir,
                          std::size_t threads) {
  cfg.validate();
  if (n_per_class == 0) throw ArgumentError("n_per_class must be >= 1");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const std::size_t total = 2 * n_per_class;
  std::vector<ManifestRecord> records(total);
  parallel_for(total, threads, [&](std::size_t k) {
    const auto clip = generate_indexed_clip(cfg, k);
    const std::string id = numbered("clip_%05zu", k);
    const fs::path dir = out_dir / id;
    std::error_code mk;
    fs::create_directories(dir, mk);
    if (mk) throw IoError("cannot create " + dir.string() + ": " + mk.message());
    for (std::size_t f = 0; f < clip.frames.size(); ++f) {
      save_frame(clip.frames[f], dir / numbered("%06zu.ppm", f));
    }
    records[k] = {id, fs::path(id), clip.label};
  });

  const auto manifest = out_dir / "manifest.csv";
  write_manifest(manifest, records);
  return manifest;
}

}  // namespace chanclip
