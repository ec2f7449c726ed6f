// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "chanclip/error.hpp"
#include "chanclip/tensor.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace chanclip;

namespace {

std::string bytes_of(const ClipU8& clip) {
  std::ostringstream out(std::ios::binary);
  write_tensor(clip, out);
  return out.str();
}

/// Sink that accepts `limit` bytes and then fails.
class LimitedBuf : public std::streambuf {
 public:
  explicit LimitedBuf(std::size_t limit) : limit_(limit) {}
  std::size_t accepted() const { return accepted_; }

 protected:
  int_type overflow(int_type ch) override {
    if (accepted_ >= limit_) return traits_type::eof();
    ++accepted_;
    return ch;
  }
  std::streamsize xsputn(const char*, std::streamsize n) override {
    const auto room = static_cast<std::streamsize>(limit_ - accepted_);
    const auto take = std::min(n, room);
    accepted_ += static_cast<std::size_t>(take);
    return take;
  }

 private:
  std::size_t limit_;
  std::size_t accepted_ = 0;
};

}  // namespace

TEST_CASE("write_tensor emits the documented CTEN layout") {
  ClipU8 clip(1, 3, 2, 2);
  for (std::size_t i = 0; i < clip.data().size(); ++i) clip.data()[i] = static_cast<std::uint8_t>(i + 1);
  const auto s = bytes_of(clip);
  REQUIRE(s.size() == 35);
  CHECK(s.substr(0, 4) == "CTEN");
  CHECK(s[4] == 0x01);
  CHECK(s[5] == 0x00);
  CHECK(s[6] == 0x04);
  const unsigned char dims[16] = {1, 0, 0, 0, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0};
  CHECK(std::equal(dims, dims + 16, reinterpret_cast<const unsigned char*>(s.data() + 7)));
  for (std::size_t i = 0; i < 12; ++i) CHECK(static_cast<unsigned char>(s[23 + i]) == i + 1);
}

TEST_CASE("zero-element tensors carry only a header") {
  TensorU8 empty{{4, 0, 3}, {}};
  std::ostringstream out(std::ios::binary);
  CHECK(write_tensor(empty, out) == 7 + 12);
  std::istringstream in(out.str(), std::ios::binary);
  CHECK(std::get<TensorU8>(read_tensor(in)) == empty);
}

TEST_CASE("float tensors are little-endian IEEE and round trip") {
  TensorF32 t{{2}, {1.0f, -2.5f}};
  std::ostringstream out(std::ios::binary);
  CHECK(write_tensor(t, out) == 7 + 4 + 8);
  const auto s = out.str();
  CHECK(s[5] == 0x01);
  // 1.0f = 0x3F800000
  CHECK(static_cast<unsigned char>(s[11]) == 0x00);
  CHECK(static_cast<unsigned char>(s[14]) == 0x3F);
  std::istringstream in(s, std::ios::binary);
  CHECK(std::get<TensorF32>(read_tensor(in)) == t);
}

TEST_CASE("read_tensor rejects malformed input") {
  ClipU8 clip(2, 3, 4, 4);
  auto s = bytes_of(clip);

  SUBCASE("bad magic") {
    s[0] = 'X';
    std::istringstream in(s, std::ios::binary);
    CHECK_THROWS_AS(read_tensor(in), FormatError);
  }
  SUBCASE("truncated payload: 95 of 96 bytes") {
    s.pop_back();
    std::istringstream in(s, std::ios::binary);
    CHECK_THROWS_AS(read_tensor(in), TruncationError);
  }
  SUBCASE("truncated header") {
    std::istringstream in(s.substr(0, 10), std::ios::binary);
    CHECK_THROWS_AS(read_tensor(in), TruncationError);
  }
  SUBCASE("unknown version") {
    s[4] = 2;
    std::istringstream in(s, std::ios::binary);
    CHECK_THROWS_AS(read_tensor(in), UnsupportedFormatError);
  }
  SUBCASE("unknown dtype") {
    s[5] = 7;
    std::istringstream in(s, std::ios::binary);
    CHECK_THROWS_AS(read_tensor(in), UnsupportedFormatError);
  }
  SUBCASE("trailing bytes") {
    s.push_back('\0');
    std::istringstream in(s, std::ios::binary);
    CHECK_THROWS_AS(read_tensor(in), FormatError);
  }
}

TEST_CASE("write failure reports bytes written so far") {
  ClipU8 clip(1, 3, 4, 4);
  LimitedBuf buf(20);
  std::ostream sink(&buf);
  try {
    write_tensor(clip, sink);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.bytes_written() <= 20);
  }
}

TEST_CASE("property: random clips round trip and sizes follow the header formula") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = rng.uniform(1, 8), h = rng.uniform(1, 16), w = rng.uniform(1, 16);
    ClipU8 clip(t, 3, h, w);
    for (auto& v : clip.data()) v = static_cast<std::uint8_t>(rng.uniform(0, 255));
    const auto s = bytes_of(clip);
    CHECK(s.size() == 7 + 16 + clip.data().size());
    std::istringstream in(s, std::ios::binary);
    CHECK(to_clip(read_tensor(in)) == clip);
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto rank = rng.uniform(1, 4);
    TensorU8 tensor;
    for (std::uint64_t r = 0; r < rank; ++r) tensor.dims.push_back(static_cast<std::uint32_t>(rng.uniform(0, 6)));
    tensor.data.resize(element_count(tensor.dims));
    std::ostringstream out(std::ios::binary);
    CHECK(write_tensor(tensor, out) == 7 + 4 * rank + tensor.data.size());
    CHECK(out.str().size() == serialized_size(DType::kU8, tensor.dims));
  }
}

TEST_CASE("frame and clip invariants") {
  CHECK_THROWS_AS(Frame(2, 2, 2), ShapeError);
  CHECK_THROWS_AS(Frame(2, 2, 3, std::vector<std::uint8_t>(11)), ShapeError);
  CHECK_THROWS_AS(ClipU8(1, 3, 2, 2, std::vector<std::uint8_t>(5)), ShapeError);
  CHECK_THROWS_AS(to_clip(TensorU8{{3, 4}, std::vector<std::uint8_t>(12)}), ShapeError);
}

TEST_CASE("tensor files") {
  testing::TempDir dir("tensor");
  ClipU8 clip(2, 3, 3, 5);
  for (std::size_t i = 0; i < clip.data().size(); ++i) clip.data()[i] = static_cast<std::uint8_t>(i * 7);
  CHECK(write_tensor_file(clip, dir / "a.cten") == 7 + 16 + 90);
  CHECK(to_clip(read_tensor_file(dir / "a.cten")) == clip);
  CHECK_THROWS_AS(read_tensor_file(dir / "missing.cten"), IoError);
}
