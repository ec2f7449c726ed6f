// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "chanclip/channelmap.hpp"
#include "chanclip/error.hpp"
#include "chanclip/ingest.hpp"
#include "doctest.h"
#include "gather_kernels.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace chanclip;

namespace {

// 1-based (frame, channel) triple for output frame i.
std::vector<std::pair<std::size_t, int>> triple(const ChannelIndexMap& m, std::size_t i) {
  std::vector<std::pair<std::size_t, int>> out;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& e = m.source(i - 1, k);
    out.emplace_back(e.frame + 1, e.channel);
  }
  return out;
}

using T3 = std::vector<std::pair<std::size_t, int>>;
constexpr int R = 0, G = 1, B = 2;

std::vector<std::size_t> valid_ts(Strategy s) {
  std::vector<std::size_t> ts;
  for (std::size_t t = min_frames(s); t <= 16; ++t) ts.push_back(t);
  return ts;
}

std::vector<Frame> random_sources(Strategy s, std::size_t t, std::size_t h, std::size_t w, Rng& rng) {
  std::vector<Frame> frames;
  for (std::size_t i = 0; i < oracle::source_count(s, t); ++i)
    frames.push_back(testing::random_frame(h, w, uses_grayscale(s) ? 1 : 3, rng));
  return frames;
}

}  // namespace

TEST_CASE("clamped boundary frames") {
  const auto tc = build_index_map(Strategy::kTc, 8);
  CHECK(triple(tc, 7) == T3{{7, R}, {8, R}, {8, R}});
  CHECK(triple(tc, 8) == T3{{8, G}, {8, G}, {8, G}});

  const auto sl = build_index_map(Strategy::kTcShortLong, 8);
  CHECK(triple(sl, 7) == T3{{3, R}, {5, R}, {7, R}});
  CHECK(triple(sl, 8) == T3{{4, G}, {6, G}, {8, G}});
  CHECK(triple(sl, 6) == triple(tc, 6));

  const auto gs = build_index_map(Strategy::kGraySt, 3);
  CHECK(triple(gs, 2) == T3{{4, 0}, {5, 0}, {6, 0}});
  CHECK(gs.source_is_grayscale());

  CHECK(triple(build_index_map(Strategy::kTc, 1), 1) == T3{{1, R}, {1, R}, {1, R}});

  const auto sl5 = build_index_map(Strategy::kTcShortLong, 5);
  CHECK(triple(sl5, 4) == T3{{1, R}, {2, R}, {4, R}});
  CHECK(triple(sl5, 5) == T3{{1, G}, {3, G}, {5, G}});

  CHECK_THROWS_AS(build_index_map(Strategy::kTcShortLong, 4), UnsupportedError);
  CHECK_THROWS_AS(build_index_map(Strategy::kRgb, 0), ArgumentError);
}

TEST_CASE("required_source_frames") {
  CHECK(required_source_frames(Strategy::kGraySt, 8) == 24);
  CHECK(required_source_frames(Strategy::kTcPlus2, 8) == 10);
  CHECK(required_source_frames(Strategy::kRgb, 1) == 1);
  for (auto s : kAllStrategies) {
    for (auto t : valid_ts(s)) {
      REQUIRE(required_source_frames(s, t) == oracle::source_count(s, t));
      REQUIRE(build_index_map(s, t).source_frame_count() == oracle::source_count(s, t));
    }
  }
}

TEST_CASE("strategy names") {
  for (auto s : kAllStrategies) CHECK(parse_strategy(to_string(s)) == s);
  CHECK(parse_strategy("tc_plus2") == Strategy::kTcPlus2);
  CHECK_THROWS_AS(parse_strategy("TC3"), ArgumentError);
}

TEST_CASE("property: map entries agree with the reference definitions") {
  for (auto s : kAllStrategies) {
    for (auto t : valid_ts(s)) {
      const auto m = build_index_map(s, t);
      for (std::size_t i = 1; i <= t; ++i) {
        for (int k = 0; k < 3; ++k) {
          const auto [f, ch] = oracle::entry(s, t, i, k);
          REQUIRE(m.source(i - 1, k).frame + 1 == f);
          REQUIRE(int{m.source(i - 1, k).channel} == ch);
        }
      }
    }
  }
}

TEST_CASE("property: gather purity on tagged planes") {
  for (auto s : kAllStrategies) {
    for (auto t : valid_ts(s)) {
      const auto frames = oracle::tagged_frames(s, t, 3, 5);
      const auto m = build_index_map(s, t);
      const auto out = chanclip::apply(m, frames);
      REQUIRE(out.dims() == std::vector<std::uint32_t>{static_cast<std::uint32_t>(t), 3, 3, 5});
      const std::size_t ch = uses_grayscale(s) ? 1 : 3;
      for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
          const auto& e = m.source(i, k);
          const auto tag = static_cast<std::uint8_t>(1 + e.frame * ch + e.channel);
          const auto plane = out.plane(i, k);
          REQUIRE(std::all_of(plane.begin(), plane.end(), [tag](auto v) { return v == tag; }));
        }
      }
      REQUIRE(out == oracle::gather(s, t, frames));
    }
  }
}

TEST_CASE("property: apply matches the pixelwise oracle on random video") {
  Rng rng(17);
  for (auto s : kAllStrategies) {
    for (auto t : valid_ts(s)) {
      for (auto [h, w] : {std::pair<std::size_t, std::size_t>{2, 2}, {7, 9}, {16, 16}, {1, 37}}) {
        const auto frames = random_sources(s, t, h, w, rng);
        REQUIRE(chanclip::apply(build_index_map(s, t), frames) == oracle::gather(s, t, frames));
      }
    }
  }
}

TEST_CASE("property: TC colour cycle") {
  for (auto s : {Strategy::kTc, Strategy::kTcPlus2, Strategy::kTcShortLong}) {
    for (auto t : valid_ts(s)) {
      const auto m = build_index_map(s, t);
      for (std::size_t i = 1; i <= t; ++i) {
        for (std::size_t k = 0; k < 3; ++k) REQUIRE(m.source(i - 1, k).channel == (i - 1) % 3);
      }
    }
  }
}

TEST_CASE("property: TC and TC_PLUS2 differ only where TC clamps") {
  for (std::size_t t = 1; t <= 16; ++t) {
    const auto a = build_index_map(Strategy::kTc, t);
    const auto b = build_index_map(Strategy::kTcPlus2, t);
    for (std::size_t i = 1; i <= t; ++i) {
      if (i + 2 <= t) {
        REQUIRE(triple(a, i) == triple(b, i));
      } else {
        REQUIRE(triple(a, i) != triple(b, i));
      }
    }
  }
}

TEST_CASE("property: source frames are non-decreasing within each output frame") {
  for (auto s : kAllStrategies) {
    for (auto t : valid_ts(s)) {
      const auto m = build_index_map(s, t);
      for (std::size_t i = 0; i < t; ++i) {
        REQUIRE(m.source(i, 0).frame <= m.source(i, 1).frame);
        REQUIRE(m.source(i, 1).frame <= m.source(i, 2).frame);
      }
    }
  }
}

TEST_CASE("property: static video collapses") {
  Rng rng(23);
  const auto still = testing::random_frame(4, 6, 3, rng);
  const auto gray = to_grayscale(still);
  for (std::size_t t = 1; t <= 16; ++t) {
    for (auto s : {Strategy::kTc, Strategy::kTcPlus2, Strategy::kTcRed, Strategy::kTcShortLong}) {
      if (t < min_frames(s)) continue;
      const std::vector<Frame> frames(required_source_frames(s, t), still);
      const auto out = chanclip::apply(build_index_map(s, t), frames);
      for (std::size_t i = 0; i < t; ++i) {
        const std::size_t c = s == Strategy::kTcRed ? 0 : i % 3;
        for (std::size_t k = 0; k < 3; ++k) {
          const auto plane = out.plane(i, k);
          for (std::size_t p = 0; p < plane.size(); ++p) REQUIRE(plane[p] == still.data()[p * 3 + c]);
        }
      }
    }
    const auto st = chanclip::apply(build_index_map(Strategy::kGraySt, t), std::vector<Frame>(3 * t, gray));
    const auto only = chanclip::apply(build_index_map(Strategy::kGrayOnly, t), std::vector<Frame>(t, gray));
    REQUIRE(st == only);
  }
}

TEST_CASE("apply rejects mismatched inputs") {
  Rng rng(1);
  const auto m = build_index_map(Strategy::kTc, 4);
  CHECK_THROWS_AS(chanclip::apply(m, random_sources(Strategy::kTc, 3, 2, 2, rng)), ShapeError);
  auto mixed = random_sources(Strategy::kTc, 4, 2, 2, rng);
  mixed[2] = testing::random_frame(3, 2, 3, rng);
  CHECK_THROWS_AS(chanclip::apply(m, mixed), ShapeError);
  const auto gray = random_sources(Strategy::kGrayOnly, 4, 2, 2, rng);
  CHECK_THROWS_AS(chanclip::apply(m, gray), ShapeError);
  CHECK_THROWS_AS(chanclip::apply(build_index_map(Strategy::kGrayOnly, 4), random_sources(Strategy::kTc, 4, 2, 2, rng)),
                  ShapeError);
  CHECK_THROWS_AS(ChannelIndexMap(1, 1, false, {{0, 0}, {0, 1}, {1, 2}}), BoundsError);
}

TEST_CASE("property: SIMD deinterleave matches the scalar kernel") {
  Rng rng(29);
  for (std::size_t pixels = 0; pixels < 200; ++pixels) {
    std::vector<std::uint8_t> src(pixels * 3);
    for (auto& v : src) v = static_cast<std::uint8_t>(rng.uniform(0, 255));
    std::vector<std::uint8_t> r1(pixels), g1(pixels), b1(pixels), r2(pixels), g2(pixels), b2(pixels);
    detail::deinterleave3(src.data(), pixels, r1.data(), g1.data(), b1.data());
    detail::deinterleave3_scalar(src.data(), pixels, r2.data(), g2.data(), b2.data());
    REQUIRE(r1 == r2);
    REQUIRE(g1 == g2);
    REQUIRE(b1 == b2);
    for (std::size_t p = 0; p < pixels; ++p) REQUIRE(g1[p] == src[3 * p + 1]);
    // Skipped channels stay untouched.
    std::vector<std::uint8_t> only_b(pixels, 7);
    detail::deinterleave3(src.data(), pixels, nullptr, nullptr, only_b.data());
    REQUIRE(only_b == b2);
  }
}

TEST_CASE("transform_clip") {
  testing::TempDir dir("cmap");
  Rng frng(31);
  std::vector<Frame> frames;
  for (int i = 0; i < 30; ++i) {
    frames.push_back(testing::random_frame(12, 16, 3, frng));
    char name[32];
    std::snprintf(name, sizeof name, "%06d.ppm", i);
    save_frame(frames.back(), dir / name);
  }
  const auto src = open_frame_dir(dir.path());

  SUBCASE("RGB with n == T is the identity on spatially processed frames") {
    std::vector<Frame> first8(frames.begin(), frames.begin() + 8);
    testing::TempDir small("cmap8");
    for (int i = 0; i < 8; ++i) save_frame(first8[i], small / ("f" + std::to_string(i) + ".ppm"));
    const auto src8 = open_frame_dir(small.path());
    SpatialSpec spatial{12, 12, 10, CropMode::kCenterCrop};
    Rng rng(0);
    const auto clip = transform_clip(src8, Strategy::kRgb, SampleSpec{8, SampleMode::kTest, 0}, spatial, rng);
    Rng rng2(0);
    const auto processed = spatial_pipeline(first8, spatial, rng2);
    REQUIRE(clip.dims() == std::vector<std::uint32_t>{8, 3, 10, 10});
    for (std::size_t t = 0; t < 8; ++t)
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t p = 0; p < 100; ++p) REQUIRE(clip.plane(t, c)[p] == processed[t].data()[p * 3 + c]);
    Rng rng3(0);
    CHECK(to_tensor(transform_clip(src8, Strategy::kRgb, SampleSpec{8, SampleMode::kTest, 0}, std::nullopt, rng3))
              .data.size() == 8 * 3 * 12 * 16);
  }

  SUBCASE("same seed, same clip") {
    SpatialSpec spatial{12, 16, 10, CropMode::kRandomCrop};
    for (auto s : kAllStrategies) {
      Rng a = Rng::for_clip(5, "x"), b = Rng::for_clip(5, "x");
      const SampleSpec spec{6, SampleMode::kTrain, 0};
      REQUIRE(transform_clip(src, s, spec, spatial, a) == transform_clip(src, s, spec, spatial, b));
    }
  }

  SUBCASE("output shape is [T, 3, H, W] for every strategy") {
    for (auto s : kAllStrategies) {
      Rng rng(1);
      const auto clip = transform_clip(src, s, SampleSpec{8, SampleMode::kTest, 0}, std::nullopt, rng);
      REQUIRE(clip.dims() == std::vector<std::uint32_t>{8, 3, 12, 16});
    }
  }

  SUBCASE("GRAY_ST decodes 3T distinct frames") {
    std::set<std::size_t> fetched;
    const FrameFetcher fetch = [&](std::size_t i) {
      fetched.insert(i);
      return frames[i];
    };
    Rng rng(0);
    const auto out = transform_frames(frames.size(), fetch, Strategy::kGraySt, SampleSpec{8, SampleMode::kTest, 0},
                                      std::nullopt, rng);
    CHECK(fetched.size() == 24);
    REQUIRE(out.size() == 1);
    // Output frame 1 holds grayscale source frames 1..3 of the 24 sampled.
    Rng idx_rng(0);
    const auto idx = sparse_indices(30, 24, SampleMode::kTest, idx_rng);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto g = to_grayscale(frames[idx[k]]);
      const auto plane = out[0].plane(0, k);
      REQUIRE(std::equal(plane.begin(), plane.end(), g.data().begin()));
    }
  }

  SUBCASE("five-crop goes through the views entry point") {
    SpatialSpec spatial{12, 12, 8, CropMode::kFiveCropFlip};
    Rng rng(0);
    CHECK_THROWS_AS(transform_clip(src, Strategy::kTc, SampleSpec{4, SampleMode::kTest, 0}, spatial, rng),
                    ArgumentError);
    Rng rng2(0);
    const auto views = transform_clip_views(src, Strategy::kTc, SampleSpec{4, SampleMode::kTest, 0}, spatial, rng2);
    REQUIRE(views.size() == 10);
    for (const auto& v : views) CHECK(v.dims() == std::vector<std::uint32_t>{4, 3, 8, 8});
  }

  SUBCASE("short clips clamp rather than fail") {
    testing::TempDir tiny("cmap2");
    save_frame(frames[0], tiny / "a.ppm");
    save_frame(frames[1], tiny / "b.ppm");
    Rng rng(0);
    const auto clip = transform_clip(open_frame_dir(tiny.path()), Strategy::kGraySt,
                                     SampleSpec{8, SampleMode::kTest, 0}, std::nullopt, rng);
    CHECK(clip.t() == 8);
  }
}
