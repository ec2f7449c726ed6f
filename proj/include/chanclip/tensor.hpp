// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace chanclip {

/// One decoded image: unsigned 8-bit samples, row-major, channels-last.
class Frame {
 public:
  Frame() = default;
  /// Zero-filled frame. Throws ShapeError unless channels is 1 or 3.
  Frame(std::size_t height, std::size_t width, std::size_t channels);
  /// Takes ownership of `data`, which must hold height*width*channels bytes.
  Frame(std::size_t height, std::size_t width, std::size_t channels,
        std::vector<std::uint8_t> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::uint8_t at(std::size_t y, std::size_t x, std::size_t c) const {
    return data_[(y * width_ + x) * channels_ + c];
  }
  std::uint8_t& at(std::size_t y, std::size_t x, std::size_t c) {
    return data_[(y * width_ + x) * channels_ + c];
  }

  bool same_shape(const Frame& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Model-ready clip, layout [T, C, H, W] row-major.
class ClipU8 {
 public:
  ClipU8() = default;
  ClipU8(std::size_t t, std::size_t c, std::size_t h, std::size_t w);
  ClipU8(std::size_t t, std::size_t c, std::size_t h, std::size_t w,
         std::vector<std::uint8_t> data);

  std::size_t t() const noexcept { return t_; }
  std::size_t c() const noexcept { return c_; }
  std::size_t h() const noexcept { return h_; }
  std::size_t w() const noexcept { return w_; }
  std::size_t plane_size() const noexcept { return h_ * w_; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  /// H*W plane for output frame `frame`, channel `channel`.
  std::span<const std::uint8_t> plane(std::size_t frame, std::size_t channel) const {
    return std::span<const std::uint8_t>(data_).subspan((frame * c_ + channel) * plane_size(),
                                                        plane_size());
  }
  std::span<std::uint8_t> plane(std::size_t frame, std::size_t channel) {
    return std::span<std::uint8_t>(data_).subspan((frame * c_ + channel) * plane_size(),
                                                  plane_size());
  }

  std::vector<std::uint32_t> dims() const;

  friend bool operator==(const ClipU8&, const ClipU8&) = default;

 private:
  std::size_t t_ = 0;
  std::size_t c_ = 0;
  std::size_t h_ = 0;
  std::size_t w_ = 0;
  std::vector<std::uint8_t> data_;
};

enum class DType : std::uint8_t { kU8 = 0, kF32 = 1 };

std::size_t dtype_size(DType dtype) noexcept;

/// Generic dense tensor of either element type, row-major.
template <typename T>
struct DenseTensor {
  std::vector<std::uint32_t> dims;
  std::vector<T> data;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;
};

using TensorU8 = DenseTensor<std::uint8_t>;
using TensorF32 = DenseTensor<float>;
using AnyTensor = std::variant<TensorU8, TensorF32>;

/// Product of dims (1 for rank 0).
std::uint64_t element_count(std::span<const std::uint32_t> dims) noexcept;

TensorU8 to_tensor(const ClipU8& clip);
/// Rank-4 u8 tensor to clip; ShapeError otherwise.
ClipU8 to_clip(const TensorU8& tensor);
ClipU8 to_clip(const AnyTensor& tensor);

// CTEN wire format, all integers little-endian:
//   "CTEN" | version u8 = 1 | dtype u8 | rank u8 | dims: rank x u32 | payload
inline constexpr std::uint8_t kCtenVersion = 1;
inline constexpr std::size_t kCtenFixedHeader = 7;

std::size_t serialized_size(DType dtype, std::span<const std::uint32_t> dims) noexcept;

/// Serialise to `sink`. Returns bytes written. Throws IoError carrying the
/// bytes written so far if the stream fails.
std::size_t write_tensor(const TensorU8& tensor, std::ostream& sink);
std::size_t write_tensor(const TensorF32& tensor, std::ostream& sink);
std::size_t write_tensor(const ClipU8& clip, std::ostream& sink);

/// Parse exactly one tensor; trailing bytes are a FormatError.
AnyTensor read_tensor(std::istream& source);

std::size_t write_tensor_file(const ClipU8& clip, const std::filesystem::path& path);
AnyTensor read_tensor_file(const std::filesystem::path& path);

}  // namespace chanclip
