// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "chanclip/tensor.hpp"

namespace chanclip {

inline constexpr std::size_t kMontageGutter = 2;

/// Grid of tiles: one row per clip, one tile per frame, each frame's three
/// planes shown as R, G, B. Black gutters of `gutter` pixels separate tiles.
/// Size: (rows*h + (rows-1)*gutter) x (T*w + (T-1)*gutter).
Frame render_montage(std::span<const ClipU8> rows, std::size_t gutter = kMontageGutter);

}  // namespace chanclip
