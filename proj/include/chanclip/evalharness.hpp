// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chanclip/channelmap.hpp"
#include "chanclip/ingest.hpp"
#include "chanclip/tensor.hpp"

namespace chanclip {

inline constexpr std::size_t kPooledSize = 32;
inline constexpr std::size_t kFeatureDim = 3 * kPooledSize * kPooledSize;

/// Per-frame feature vectors of one clip, row-major [frames, dim].
struct ClipFeatures {
  std::size_t frames = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> frame(std::size_t t) const {
    return std::span<const double>(values).subspan(t * dim, dim);
  }
};

/// Average-pool each channel plane to 32x32, scale by 1/255, flatten
/// channel-major. H and W must be multiples of 32.
ClipFeatures featurize(const ClipU8& clip);

/// Per-frame linear softmax classifier, weights row-major [classes, dim].
struct LinearModel {
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  static LinearModel zeros(std::size_t classes, std::size_t dim);

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// [frames, classes] logits, one row per frame.
std::vector<double> frame_logits(const LinearModel& model, const ClipFeatures& features);

/// Mean of per-frame logits over frames; `logits` is row-major [frames, classes].
std::vector<double> aggregate_tsn(std::span<const double> logits, std::size_t classes);

/// argmax of the aggregated logits (lowest index on ties).
int predict(const LinearModel& model, const ClipFeatures& features);

struct LabeledFeatures {
  ClipFeatures features;
  int label = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  LinearModel grad;  // same shape as the model
};

/// Mean softmax cross-entropy of the frame-averaged logits over the batch,
/// with its exact gradient.
LossAndGrad loss_and_grad(const LinearModel& model, std::span<const LabeledFeatures> batch);

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::size_t model_frames = 4;
  std::uint64_t seed = 0;
  /// nullopt keeps frames at native size; evaluation forces center crop.
  std::optional<SpatialSpec> spatial;

  void validate() const;
};

/// A decoded clip held in memory.
struct LabeledClip {
  std::string id;
  int label = 0;
  std::vector<Frame> frames;
};

std::vector<LabeledClip> load_labeled_clips(const std::filesystem::path& manifest,
                                            std::size_t threads = 1);

/// transform_frames + featurize for an in-memory clip.
ClipFeatures clip_features(const LabeledClip& clip, Strategy strategy, const SampleSpec& spec,
                           const std::optional<SpatialSpec>& spatial, Rng& rng);

struct TrainResult {
  LinearModel model;
  double final_loss = 0.0;
};

/// Called after each epoch with (1-based epoch, mean train loss, model).
using EpochCallback = std::function<void(std::size_t, double, const LinearModel&)>;

/**
 * Minibatch SGD from a zero model.
 *
 * Each epoch shuffles the clip order with a generator derived from
 * (seed, epoch) and re-samples frames in train mode with per-clip generators
 * derived from (seed, epoch, clip id). Single-threaded, so the result is a
 * pure function of the inputs. The reported loss is the sample-weighted mean
 * of the pre-update minibatch losses. Throws TrainingError on a non-finite
 * loss.
 */
TrainResult train(std::span<const LabeledClip> clips, Strategy strategy, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});
TrainResult train(const std::filesystem::path& train_manifest, Strategy strategy,
                  const TrainConfig& cfg);

/// Top-1 accuracy with test-mode sampling; exact integer counting, so the
/// result does not depend on `threads`.
double evaluate(const LinearModel& model, std::span<const LabeledClip> clips, Strategy strategy,
                std::size_t t, const std::optional<SpatialSpec>& spatial = std::nullopt,
                std::size_t threads = 1);
double evaluate(const LinearModel& model, const std::filesystem::path& test_manifest,
                Strategy strategy, std::size_t t,
                const std::optional<SpatialSpec>& spatial = std::nullopt, std::size_t threads = 1);

}  // namespace chanclip
