// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chanclip {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stream or filesystem failure. For writes, carries the number of bytes
/// that reached the sink before the failure.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what, std::size_t bytes_written = 0)
      : Error(what), bytes_written_(bytes_written) {}
  std::size_t bytes_written() const noexcept { return bytes_written_; }

 private:
  std::size_t bytes_written_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public FormatError {
 public:
  using FormatError::FormatError;
};

class UnsupportedFormatError : public FormatError {
 public:
  using FormatError::FormatError;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class EmptySourceError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Requested combination is not defined (e.g. TC_SHORTLONG with T < 5).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss during optimisation.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace chanclip
