// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "chanclip/montage.hpp"

#include "chanclip/error.hpp"

namespace chanclip {

Frame render_montage(std::span<const ClipU8> rows, std::size_t gutter) {
  if (rows.empty()) throw ArgumentError("montage needs at least one row");
  const auto& first = rows.front();
  for (const auto& r : rows) {
    if (r.c() != 3) throw ShapeError("montage rows must have 3 channels");
    if (r.t() != first.t() || r.h() != first.h() || r.w() != first.w()) {
      throw ShapeError("montage rows must share [T, H, W]");
    }
  }
  const std::size_t t = first.t();
  const std::size_t h = first.h();
  const std::size_t w = first.w();
  Frame out(rows.size() * h + (rows.size() - 1) * gutter, t * w + (t - 1) * gutter, 3);
  for (std::size_t row = 0; row < rows.size(); ++row) {
    for (std::size_t i = 0; i < t; ++i) {
      const std::size_t y0 = row * (h + gutter);
      const std::size_t x0 = i * (w + gutter);
      for (std::size_t c = 0; c < 3; ++c) {
        const auto plane = rows[row].plane(i, c);
        for (std::size_t y = 0; y < h; ++y) {
          for (std::size_t x = 0; x < w; ++x) out.at(y0 + y, x0 + x, c) = plane[y * w + x];
        }
      }
    }
  }
  return out;
}

}  // namespace chanclip
