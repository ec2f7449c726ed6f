// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "chanclip/rng.hpp"
#include "chanclip/tensor.hpp"

namespace chanclip::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("chanclip_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline Frame random_frame(std::size_t h, std::size_t w, std::size_t c, Rng& rng) {
  Frame f(h, w, c);
  for (auto& v : f.data()) v = static_cast<std::uint8_t>(rng.uniform(0, 255));
  return f;
}

}  // namespace chanclip::testing
