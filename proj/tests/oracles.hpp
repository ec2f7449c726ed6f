// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations used as test oracles. They are written from the
// channel definitions in 1-based form and materialise outputs pixel by pixel;
// nothing here calls into the library's index-map code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "chanclip/channelmap.hpp"
#include "chanclip/evalharness.hpp"
#include "chanclip/tensor.hpp"

namespace chanclip::oracle {

inline std::size_t source_count(Strategy s, std::size_t T) {
  if (s == Strategy::kTcPlus2) return T + 2;
  if (s == Strategy::kGraySt) return 3 * T;
  return T;
}

/// (1-based source frame, source channel) feeding output frame i, channel k.
inline std::pair<std::size_t, int> entry(Strategy s, std::size_t T, std::size_t i, int k) {
  const int ci = static_cast<int>((i - 1) % 3);
  const auto lim = [T](std::size_t f) { return f > T ? T : f; };
  switch (s) {
    case Strategy::kRgb:
      return {i, k};
    case Strategy::kTc:
      return {lim(i + k), ci};
    case Strategy::kTcPlus2:
      return {i + k, ci};
    case Strategy::kTcRgb:
      return {lim(i + k), k};
    case Strategy::kTcRed:
      return {lim(i + k), 0};
    case Strategy::kTcShortLong: {
      if (i + 2 <= T) return {i + k, ci};
      // x_{i-4}, x_{i-2}, x_i; the oldest is held at x_1 when T = 5
      std::size_t f = i - 4 + 2 * static_cast<std::size_t>(k);
      if (i < 5 && k == 0) f = 1;
      return {f, ci};
    }
    case Strategy::kGraySt:
      return {3 * i - 2 + k, 0};
    case Strategy::kGrayOnly:
      return {i, 0};
  }
  return {0, 0};
}

/// Brute-force gather: out[i][k](y, x) = frames[f - 1](y, x, ch).
inline ClipU8 gather(Strategy s, std::size_t T, const std::vector<Frame>& frames) {
  const auto h = frames.at(0).height(), w = frames.at(0).width();
  ClipU8 out(T, 3, h, w);
  for (std::size_t i = 1; i <= T; ++i) {
    for (int k = 0; k < 3; ++k) {
      const auto [f, ch] = entry(s, T, i, k);
      const Frame& src = frames.at(f - 1);
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          out.data()[(((i - 1) * 3 + k) * h + y) * w + x] = src.at(y, x, static_cast<std::size_t>(ch));
        }
      }
    }
  }
  return out;
}

/// Source frames whose every channel plane holds its own constant, 1 + plane id.
inline std::vector<Frame> tagged_frames(Strategy s, std::size_t T, std::size_t h, std::size_t w) {
  const std::size_t ch = uses_grayscale(s) ? 1 : 3;
  std::vector<Frame> frames;
  for (std::size_t f = 0; f < source_count(s, T); ++f) {
    Frame fr(h, w, ch);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x)
        for (std::size_t c = 0; c < ch; ++c) fr.at(y, x, c) = static_cast<std::uint8_t>(1 + f * ch + c);
    frames.push_back(std::move(fr));
  }
  return frames;
}

/// Mean cross-entropy of TSN-averaged linear logits, computed directly.
inline double tsn_loss(const LinearModel& m, const std::vector<LabeledFeatures>& batch) {
  double total = 0;
  for (const auto& ex : batch) {
    std::vector<long double> z(m.classes, 0.0L);
    for (std::size_t c = 0; c < m.classes; ++c) {
      long double acc = 0;
      for (std::size_t t = 0; t < ex.features.frames; ++t) {
        long double dot = m.bias[c];
        for (std::size_t d = 0; d < m.dim; ++d) dot += m.weights[c * m.dim + d] * ex.features.values[t * m.dim + d];
        acc += dot;
      }
      z[c] = acc / ex.features.frames;
    }
    long double mx = z[0];
    for (auto v : z) mx = std::max(mx, v);
    long double sum = 0;
    for (auto v : z) sum += std::exp(v - mx);
    total += static_cast<double>(std::log(sum) + mx - z[static_cast<std::size_t>(ex.label)]);
  }
  return total / static_cast<double>(batch.size());
}

/// One random (model, batch) trial: largest elementwise relative error of the
/// analytic gradient against central differences with step eps. Entries whose
/// magnitude is below `floor` are judged relative to `floor`.
template <typename RngT>
double gradient_check_trial(RngT& rng, double eps = 1e-6, double floor = 1e-4) {
  const std::size_t classes = rng.uniform(2, 4), dim = rng.uniform(1, 12);
  LinearModel m = LinearModel::zeros(classes, dim);
  for (auto& w : m.weights) w = (2 * rng.uniform_real() - 1);
  for (auto& b : m.bias) b = (2 * rng.uniform_real() - 1);
  std::vector<LabeledFeatures> batch(rng.uniform(1, 6));
  for (auto& ex : batch) {
    ex.features.frames = rng.uniform(1, 5);
    ex.features.dim = dim;
    ex.features.values.resize(ex.features.frames * dim);
    for (auto& v : ex.features.values) v = rng.uniform_real();
    ex.label = static_cast<int>(rng.uniform(0, classes - 1));
  }
  const auto analytic = loss_and_grad(m, batch);
  double worst = 0;
  auto probe = [&](double& param, double g) {
    const double keep = param;
    param = keep + eps;
    const double up = tsn_loss(m, batch);
    param = keep - eps;
    const double down = tsn_loss(m, batch);
    param = keep;
    const double numeric = (up - down) / (2 * eps);
    const double denom = std::max({std::abs(g), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(g - numeric) / denom);
  };
  for (std::size_t i = 0; i < m.weights.size(); ++i) probe(m.weights[i], analytic.grad.weights[i]);
  for (std::size_t i = 0; i < m.bias.size(); ++i) probe(m.bias[i], analytic.grad.bias[i]);
  return worst;
}

}  // namespace chanclip::oracle
