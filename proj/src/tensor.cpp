// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "chanclip/tensor.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "chanclip/error.hpp"

namespace chanclip {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'T', 'E', 'N'};

void check_channels(std::size_t channels) {
  if (channels != 1 && channels != 3) {
    throw ShapeError("frame channels must be 1 or 3, got " + std::to_string(channels));
  }
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

/// Writes `n` bytes and keeps a running total for error reporting.
class CountingWriter {
 public:
  explicit CountingWriter(std::ostream& sink) : sink_(sink) {}

  void write(const void* bytes, std::size_t n) {
    if (n == 0) return;
    const auto before = sink_.tellp();
    sink_.write(static_cast<const char*>(bytes), static_cast<std::streamsize>(n));
    if (!sink_) {
      std::size_t partial = 0;
      sink_.clear();
      const auto after = sink_.tellp();
      if (before != std::streampos(-1) && after != std::streampos(-1) && after >= before) {
        partial = static_cast<std::size_t>(after - before);
      }
      throw IoError("tensor sink write failed", written_ + partial);
    }
    written_ += n;
  }

  std::size_t written() const noexcept { return written_; }

 private:
  std::ostream& sink_;
  std::size_t written_ = 0;
};

std::string encode_header(DType dtype, std::span<const std::uint32_t> dims) {
  if (dims.size() > std::numeric_limits<std::uint8_t>::max()) {
    throw ArgumentError("tensor rank exceeds 255");
  }
  std::string header(kMagic.begin(), kMagic.end());
  header.push_back(static_cast<char>(kCtenVersion));
  header.push_back(static_cast<char>(dtype));
  header.push_back(static_cast<char>(dims.size()));
  for (auto d : dims) put_u32(header, d);
  return header;
}

template <typename T>
void check_payload(const DenseTensor<T>& tensor) {
  if (element_count(tensor.dims) != tensor.data.size()) {
    throw ShapeError("tensor payload does not match dims");
  }
}

void read_exact(std::istream& source, void* out, std::size_t n, const char* what) {
  if (n == 0) return;
  source.read(static_cast<char*>(out), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(source.gcount()) != n) {
    throw TruncationError(std::string("truncated tensor ") + what + ": expected " +
                          std::to_string(n) + " bytes, got " +
                          std::to_string(source.gcount()));
  }
}

}  // namespace

Frame::Frame(std::size_t height, std::size_t width, std::size_t channels)
    : height_(height), width_(width), channels_(channels), data_(height * width * channels) {
  check_channels(channels);
}

Frame::Frame(std::size_t height, std::size_t width, std::size_t channels,
             std::vector<std::uint8_t> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_channels(channels);
  if (data_.size() != height * width * channels) {
    throw ShapeError("frame data length " + std::to_string(data_.size()) + " != " +
                     std::to_string(height) + "x" + std::to_string(width) + "x" +
                     std::to_string(channels));
  }
}

ClipU8::ClipU8(std::size_t t, std::size_t c, std::size_t h, std::size_t w)
    : t_(t), c_(c), h_(h), w_(w), data_(t * c * h * w) {}

ClipU8::ClipU8(std::size_t t, std::size_t c, std::size_t h, std::size_t w,
               std::vector<std::uint8_t> data)
    : t_(t), c_(c), h_(h), w_(w), data_(std::move(data)) {
  if (data_.size() != t * c * h * w) throw ShapeError("clip data length does not match dims");
}

std::vector<std::uint32_t> ClipU8::dims() const {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (t_ > kMax || c_ > kMax || h_ > kMax || w_ > kMax) {
    throw ShapeError("clip dimension exceeds 32 bits");
  }
  return {static_cast<std::uint32_t>(t_), static_cast<std::uint32_t>(c_),
          static_cast<std::uint32_t>(h_), static_cast<std::uint32_t>(w_)};
}

std::size_t dtype_size(DType dtype) noexcept { return dtype == DType::kF32 ? 4 : 1; }

std::uint64_t element_count(std::span<const std::uint32_t> dims) noexcept {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

TensorU8 to_tensor(const ClipU8& clip) {
  return TensorU8{clip.dims(), std::vector<std::uint8_t>(clip.data().begin(), clip.data().end())};
}

ClipU8 to_clip(const TensorU8& tensor) {
  if (tensor.dims.size() != 4) throw ShapeError("clip tensor must have rank 4");
  const auto& d = tensor.dims;
  return ClipU8(d[0], d[1], d[2], d[3], tensor.data);
}

ClipU8 to_clip(const AnyTensor& tensor) {
  if (const auto* u8 = std::get_if<TensorU8>(&tensor)) return to_clip(*u8);
  throw ShapeError("clip tensor must have dtype u8");
}

std::size_t serialized_size(DType dtype, std::span<const std::uint32_t> dims) noexcept {
  return kCtenFixedHeader + 4 * dims.size() +
         static_cast<std::size_t>(element_count(dims)) * dtype_size(dtype);
}

std::size_t write_tensor(const TensorU8& tensor, std::ostream& sink) {
  check_payload(tensor);
  CountingWriter out(sink);
  const auto header = encode_header(DType::kU8, tensor.dims);
  out.write(header.data(), header.size());
  out.write(tensor.data.data(), tensor.data.size());
  return out.written();
}

std::size_t write_tensor(const TensorF32& tensor, std::ostream& sink) {
  check_payload(tensor);
  CountingWriter out(sink);
  const auto header = encode_header(DType::kF32, tensor.dims);
  out.write(header.data(), header.size());
  if constexpr (std::endian::native == std::endian::little) {
    out.write(tensor.data.data(), tensor.data.size() * sizeof(float));
  } else {
    std::string payload;
    payload.reserve(tensor.data.size() * 4);
    for (float f : tensor.data) put_u32(payload, std::bit_cast<std::uint32_t>(f));
    out.write(payload.data(), payload.size());
  }
  return out.written();
}

std::size_t write_tensor(const ClipU8& clip, std::ostream& sink) {
  CountingWriter out(sink);
  const auto header = encode_header(DType::kU8, clip.dims());
  out.write(header.data(), header.size());
  out.write(clip.data().data(), clip.data().size());
  return out.written();
}

AnyTensor read_tensor(std::istream& source) {
  std::array<unsigned char, kCtenFixedHeader> fixed{};
  read_exact(source, fixed.data(), fixed.size(), "header");
  if (std::memcmp(fixed.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("bad tensor magic, expected \"CTEN\"");
  }
  if (fixed[4] != kCtenVersion) {
    throw UnsupportedFormatError("unsupported tensor version " + std::to_string(fixed[4]));
  }
  if (fixed[5] > static_cast<unsigned char>(DType::kF32)) {
    throw UnsupportedFormatError("unsupported tensor dtype " + std::to_string(fixed[5]));
  }
  const auto dtype = static_cast<DType>(fixed[5]);
  const std::size_t rank = fixed[6];

  std::vector<unsigned char> dim_bytes(4 * rank);
  read_exact(source, dim_bytes.data(), dim_bytes.size(), "dims");
  std::vector<std::uint32_t> dims(rank);
  for (std::size_t i = 0; i < rank; ++i) dims[i] = get_u32(dim_bytes.data() + 4 * i);

  const std::uint64_t count = element_count(dims);
  AnyTensor result;
  if (dtype == DType::kU8) {
    TensorU8 t{dims, std::vector<std::uint8_t>(count)};
    read_exact(source, t.data.data(), t.data.size(), "payload");
    result = std::move(t);
  } else {
    std::vector<unsigned char> raw(count * 4);
    read_exact(source, raw.data(), raw.size(), "payload");
    TensorF32 t{dims, std::vector<float>(count)};
    for (std::size_t i = 0; i < count; ++i) {
      t.data[i] = std::bit_cast<float>(get_u32(raw.data() + 4 * i));
    }
    result = std::move(t);
  }
  if (source.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after tensor payload");
  }
  return result;
}

std::size_t write_tensor_file(const ClipU8& clip, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto n = write_tensor(clip, out);
  out.close();
  if (!out) throw IoError("failed to flush " + path.string(), n);
  return n;
}

AnyTensor read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_tensor(in);
}

}  // namespace chanclip
