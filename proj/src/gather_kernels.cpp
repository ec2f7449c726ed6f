// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gather_kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define CHANCLIP_HAVE_X86 1
#endif

namespace chanclip::detail {

void deinterleave3_scalar(const std::uint8_t* src, std::size_t pixels, std::uint8_t* r,
                          std::uint8_t* g, std::uint8_t* b) {
  std::uint8_t* dst[3] = {r, g, b};
  for (int c = 0; c < 3; ++c) {
    if (dst[c] == nullptr) continue;
    const std::uint8_t* s = src + c;
    std::uint8_t* d = dst[c];
    for (std::size_t p = 0; p < pixels; ++p) d[p] = s[3 * p];
  }
}

#ifdef CHANCLIP_HAVE_X86

namespace {

// pshufb masks picking channel c of 16 pixels out of three 16-byte loads.
// -1 lanes are zeroed and filled by the other two loads.
alignas(16) constexpr std::int8_t kMask[3][3][16] = {
    {{0, 3, 6, 9, 12, 15, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1},
     {-1, -1, -1, -1, -1, -1, 2, 5, 8, 11, 14, -1, -1, -1, -1, -1},
     {-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 1, 4, 7, 10, 13}},
    {{1, 4, 7, 10, 13, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1},
     {-1, -1, -1, -1, -1, 0, 3, 6, 9, 12, 15, -1, -1, -1, -1, -1},
     {-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 2, 5, 8, 11, 14}},
    {{2, 5, 8, 11, 14, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1},
     {-1, -1, -1, -1, -1, 1, 4, 7, 10, 13, -1, -1, -1, -1, -1, -1},
     {-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0, 3, 6, 9, 12, 15}},
};

__attribute__((target("ssse3"))) void deinterleave3_ssse3(const std::uint8_t* src,
                                                          std::size_t pixels, std::uint8_t* r,
                                                          std::uint8_t* g, std::uint8_t* b) {
  std::uint8_t* dst[3] = {r, g, b};
  __m128i m[3][3];
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < 3; ++k) m[c][k] = _mm_load_si128(reinterpret_cast<const __m128i*>(kMask[c][k]));
  }
  std::size_t p = 0;
  for (; p + 16 <= pixels; p += 16) {
    const auto* s = reinterpret_cast<const __m128i*>(src + 3 * p);
    const __m128i a = _mm_loadu_si128(s);
    const __m128i bb = _mm_loadu_si128(s + 1);
    const __m128i cc = _mm_loadu_si128(s + 2);
    for (int c = 0; c < 3; ++c) {
      if (dst[c] == nullptr) continue;
      const __m128i v = _mm_or_si128(
          _mm_or_si128(_mm_shuffle_epi8(a, m[c][0]), _mm_shuffle_epi8(bb, m[c][1])),
          _mm_shuffle_epi8(cc, m[c][2]));
      _mm_storeu_si128(reinterpret_cast<__m128i*>(dst[c] + p), v);
    }
  }
  if (p < pixels) {
    deinterleave3_scalar(src + 3 * p, pixels - p, r ? r + p : nullptr, g ? g + p : nullptr,
                         b ? b + p : nullptr);
  }
}

bool have_ssse3() {
  static const bool supported = __builtin_cpu_supports("ssse3");
  return supported;
}

}  // namespace

#endif

void deinterleave3(const std::uint8_t* src, std::size_t pixels, std::uint8_t* r, std::uint8_t* g,
                   std::uint8_t* b) {
#ifdef CHANCLIP_HAVE_X86
  if (have_ssse3()) {
    deinterleave3_ssse3(src, pixels, r, g, b);
    return;
  }
#endif
  deinterleave3_scalar(src, pixels, r, g, b);
}

}  // namespace chanclip::detail
