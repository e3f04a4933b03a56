// Copyright 2026 The dynlstm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DYNLSTM_ERRORS_HPP_
#define DYNLSTM_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace dynlstm {

// Bad argument to a library call: dimension mismatch, out-of-range index,
// non-finite value, etc.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ParseErrorKind {
  Io,         // file missing or unreadable
  Syntax,     // malformed manifest / header / config line
  Dimension,  // sizes inconsistent with each other
  Layout,     // tensor regions overlap, leave gaps, or overrun the blob
  Truncated,  // payload shorter (or longer) than declared
};

const char* to_string(ParseErrorKind kind);

// Malformed model, sequence or config file. `offset` is the byte offset in
// the offending file where the problem was detected, or -1 when the error is
// not positional.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& what,
             std::int64_t offset = -1)
      : std::runtime_error(offset >= 0 ? what + " (at byte " +
                                             std::to_string(offset) + ")"
                                       : what),
        kind_(kind),
        offset_(offset) {}
  ParseErrorKind kind() const noexcept { return kind_; }
  std::int64_t offset() const noexcept { return offset_; }

 private:
  ParseErrorKind kind_;
  std::int64_t offset_;
};

// A model or sequence does not fit one of the accelerator's on-chip buffers.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(std::string buffer, std::uint64_t required,
                std::uint64_t capacity)
      : std::runtime_error(buffer + ": requires " + std::to_string(required) +
                           " bytes, capacity is " + std::to_string(capacity)),
        buffer_(std::move(buffer)),
        required_(required),
        capacity_(capacity) {}

  const std::string& buffer() const noexcept { return buffer_; }
  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t capacity() const noexcept { return capacity_; }

 private:
  std::string buffer_;
  std::uint64_t required_;
  std::uint64_t capacity_;
};

}  // namespace dynlstm

#endif  // DYNLSTM_ERRORS_HPP_
