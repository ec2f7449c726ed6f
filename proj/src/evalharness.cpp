// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "chanclip/evalharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>

#include "chanclip/error.hpp"
#include "chanclip/parallel.hpp"

namespace chanclip {

namespace {

constexpr std::uint64_t kTrainSampleKey = 0x73616D706C65ull;

std::vector<double> mean_frame(const ClipFeatures& f) {
  std::vector<double> mean(f.dim, 0.0);
  for (std::size_t t = 0; t < f.frames; ++t) {
    const auto row = f.frame(t);
    for (std::size_t d = 0; d < f.dim; ++d) mean[d] += row[d];
  }
  const double inv = 1.0 / static_cast<double>(f.frames);
  for (auto& v : mean) v *= inv;
  return mean;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Shuffle within each class, then interleave classes so that every prefix
// holds them in proportion to their totals.
std::vector<std::size_t> stratified_order(std::span<const LabeledClip> clips, Rng& rng) {
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < clips.size(); ++i) by_label[clips[i].label].push_back(i);
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [label, idx] : by_label) {
    rng.shuffle(idx);
    groups.push_back(std::move(idx));
  }
  std::vector<std::size_t> taken(groups.size(), 0);
  std::vector<std::size_t> order;
  order.reserve(clips.size());
  while (order.size() < clips.size()) {
    // Pick the group furthest behind its quota: smallest (taken+1)/size.
    std::size_t best = groups.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (taken[g] == groups[g].size()) continue;
      if (best == groups.size() ||
          (taken[g] + 1) * groups[best].size() < (taken[best] + 1) * groups[g].size()) {
        best = g;
      }
    }
    order.push_back(groups[best][taken[best]++]);
  }
  return order;
}

}  // namespace

ClipFeatures featurize(const ClipU8& clip) {
  if (clip.c() != 3) throw ShapeError("featurize expects 3-channel clips");
  if (clip.h() == 0 || clip.w() == 0 || clip.h() % kPooledSize != 0 ||
      clip.w() % kPooledSize != 0) {
    throw ShapeError("featurize needs H and W to be multiples of 32, got " +
                     std::to_string(clip.h()) + "x" + std::to_string(clip.w()));
  }
  const std::size_t ph = clip.h() / kPooledSize;
  const std::size_t pw = clip.w() / kPooledSize;
  const double scale = 1.0 / (255.0 * static_cast<double>(ph * pw));

  ClipFeatures out{clip.t(), kFeatureDim, std::vector<double>(clip.t() * kFeatureDim)};
  std::vector<std::uint32_t> sums(kPooledSize * kPooledSize);
  for (std::size_t t = 0; t < clip.t(); ++t) {
    for (std::size_t c = 0; c < 3; ++c) {
      const auto plane = clip.plane(t, c);
      std::fill(sums.begin(), sums.end(), 0u);
      for (std::size_t y = 0; y < clip.h(); ++y) {
        const auto* row = plane.data() + y * clip.w();
        auto* acc = sums.data() + (y / ph) * kPooledSize;
        for (std::size_t x = 0; x < clip.w(); ++x) acc[x / pw] += row[x];
      }
      double* dst = out.values.data() + t * kFeatureDim + c * kPooledSize * kPooledSize;
      for (std::size_t i = 0; i < sums.size(); ++i) dst[i] = sums[i] * scale;
    }
  }
  return out;
}

LinearModel LinearModel::zeros(std::size_t classes, std::size_t dim) {
  return LinearModel{classes, dim, std::vector<double>(classes * dim, 0.0),
                     std::vector<double>(classes, 0.0)};
}

std::vector<double> frame_logits(const LinearModel& model, const ClipFeatures& features) {
  if (features.dim != model.dim) throw ShapeError("feature dim does not match model");
  std::vector<double> logits(features.frames * model.classes);
  for (std::size_t t = 0; t < features.frames; ++t) {
    const auto x = features.frame(t);
    for (std::size_t c = 0; c < model.classes; ++c) {
      const double* w = model.weights.data() + c * model.dim;
      logits[t * model.classes + c] = std::inner_product(x.begin(), x.end(), w, model.bias[c]);
    }
  }
  return logits;
}

std::vector<double> aggregate_tsn(std::span<const double> logits, std::size_t classes) {
  if (classes == 0 || logits.empty() || logits.size() % classes != 0) {
    throw ShapeError("aggregate_tsn expects a non-empty [frames, classes] matrix");
  }
  const std::size_t frames = logits.size() / classes;
  std::vector<double> mean(classes, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t c = 0; c < classes; ++c) mean[c] += logits[t * classes + c];
  }
  for (auto& v : mean) v /= static_cast<double>(frames);
  return mean;
}

int predict(const LinearModel& model, const ClipFeatures& features) {
  const auto agg = aggregate_tsn(frame_logits(model, features), model.classes);
  return static_cast<int>(argmax(agg));
}

LossAndGrad loss_and_grad(const LinearModel& model, std::span<const LabeledFeatures> batch) {
  if (batch.empty()) throw ArgumentError("loss_and_grad needs a non-empty batch");
  LossAndGrad out{0.0, LinearModel::zeros(model.classes, model.dim)};
  std::vector<double> prob(model.classes);

  for (const auto& sample : batch) {
    if (sample.label < 0 || static_cast<std::size_t>(sample.label) >= model.classes) {
      throw ArgumentError("label out of range for model");
    }
    const auto z = aggregate_tsn(frame_logits(model, sample.features), model.classes);
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      prob[c] = std::exp(z[c] - zmax);
      denom += prob[c];
    }
    out.loss += zmax + std::log(denom) - z[static_cast<std::size_t>(sample.label)];

    // d(loss)/d(z) = p - onehot; z is linear in the mean frame feature.
    const auto x = mean_frame(sample.features);
    for (std::size_t c = 0; c < model.classes; ++c) {
      const double g = prob[c] / denom - (static_cast<int>(c) == sample.label ? 1.0 : 0.0);
      out.grad.bias[c] += g;
      double* gw = out.grad.weights.data() + c * model.dim;
      for (std::size_t d = 0; d < model.dim; ++d) gw[d] += g * x[d];
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  for (auto& v : out.grad.weights) v *= inv;
  for (auto& v : out.grad.bias) v *= inv;
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ArgumentError("learning_rate must be finite and non-negative");
  }
  if (epochs == 0 || batch_size == 0 || model_frames == 0) {
    throw ArgumentError("epochs, batch_size and model_frames must be positive");
  }
  if (spatial) spatial->validate();
}

std::vector<LabeledClip> load_labeled_clips(const std::filesystem::path& manifest,
                                            std::size_t threads) {
  const auto sources = open_manifest(manifest);
  std::vector<LabeledClip> clips(sources.size());
  parallel_for(sources.size(), threads, [&](std::size_t i) {
    const auto& src = sources[i];
    if (!src.label || *src.label < 0) {
      throw FormatError("clip " + src.id + " has no valid label in " + manifest.string());
    }
    LabeledClip clip{src.id, *src.label, {}};
    clip.frames.reserve(src.frame_count());
    for (const auto& p : src.frame_paths) clip.frames.push_back(load_frame(p));
    clips[i] = std::move(clip);
  });
  return clips;
}

ClipFeatures clip_features(const LabeledClip& clip, Strategy strategy, const SampleSpec& spec,
                           const std::optional<SpatialSpec>& spatial, Rng& rng) {
  auto clips = transform_frames(
      clip.frames.size(), [&](std::size_t i) { return clip.frames[i]; }, strategy, spec, spatial,
      rng);
  return featurize(clips.front());
}

TrainResult train(std::span<const LabeledClip> clips, Strategy strategy, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (clips.empty()) throw ArgumentError("training set is empty");
  int max_label = 1;
  for (const auto& c : clips) max_label = std::max(max_label, c.label);

  TrainResult result{LinearModel::zeros(static_cast<std::size_t>(max_label) + 1, kFeatureDim), 0.0};
  auto& model = result.model;
  std::vector<std::size_t> order(clips.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<LabeledFeatures> batch;
  batch.reserve(cfg.batch_size);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const std::uint64_t epoch_seed = derive_seed(cfg.seed, epoch);
    Rng order_rng(epoch_seed);
    order = stratified_order(clips, order_rng);
    const SampleSpec spec{cfg.model_frames, SampleMode::kTrain,
                          derive_seed(epoch_seed, kTrainSampleKey)};

    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      batch.clear();
      for (std::size_t j = begin; j < end; ++j) {
        const auto& clip = clips[order[j]];
        Rng rng = Rng::for_clip(spec.seed, clip.id);
        batch.push_back({clip_features(clip, strategy, spec, cfg.spatial, rng), clip.label});
      }
      auto step = loss_and_grad(model, batch);
      if (!std::isfinite(step.loss)) {
        throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch));
      }
      loss_sum += step.loss * static_cast<double>(batch.size());
      for (std::size_t i = 0; i < model.weights.size(); ++i) {
        model.weights[i] -= cfg.learning_rate * step.grad.weights[i];
      }
      for (std::size_t i = 0; i < model.bias.size(); ++i) {
        model.bias[i] -= cfg.learning_rate * step.grad.bias[i];
      }
    }
    result.final_loss = loss_sum / static_cast<double>(order.size());
    if (on_epoch) on_epoch(epoch, result.final_loss, model);
  }
  return result;
}

TrainResult train(const std::filesystem::path& train_manifest, Strategy strategy,
                  const TrainConfig& cfg) {
  const auto clips = load_labeled_clips(train_manifest);
  return train(clips, strategy, cfg);
}

double evaluate(const LinearModel& model, std::span<const LabeledClip> clips, Strategy strategy,
                std::size_t t, const std::optional<SpatialSpec>& spatial, std::size_t threads) {
  if (clips.empty()) throw ArgumentError("evaluation set is empty");
  std::optional<SpatialSpec> centered = spatial;
  if (centered) centered->mode = CropMode::kCenterCrop;
  const SampleSpec spec{t, SampleMode::kTest, 0};

  std::atomic<std::size_t> correct{0};
  parallel_for(clips.size(), threads, [&](std::size_t i) {
    Rng rng = Rng::for_clip(spec.seed, clips[i].id);
    const auto features = clip_features(clips[i], strategy, spec, centered, rng);
    if (predict(model, features) == clips[i].label) correct.fetch_add(1);
  });
  return static_cast<double>(correct.load()) / static_cast<double>(clips.size());
}

double evaluate(const LinearModel& model, const std::filesystem::path& test_manifest,
                Strategy strategy, std::size_t t, const std::optional<SpatialSpec>& spatial,
                std::size_t threads) {
  const auto clips = load_labeled_clips(test_manifest, threads);
  return evaluate(model, clips, strategy, t, spatial, threads);
}

}  // namespace chanclip
