// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

namespace chanclip::detail {

/// Split `pixels` interleaved 3-byte pixels into planes. A null destination
/// skips that channel.
void deinterleave3(const std::uint8_t* src, std::size_t pixels, std::uint8_t* r,
                   std::uint8_t* g, std::uint8_t* b);

/// Scalar reference of deinterleave3, always available.
void deinterleave3_scalar(const std::uint8_t* src, std::size_t pixels, std::uint8_t* r,
                          std::uint8_t* g, std::uint8_t* b);

}  // namespace chanclip::detail
