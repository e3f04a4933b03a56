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

// Symmetric linear quantization and the shared-byte 8/4-bit index encoding.
//
// A real value y is mapped to the integer index round(y / step), where
// step = alpha / 2^(bits-1) and alpha is the largest magnitude in the tensor.
// Indices are clamped to the symmetric range [-(2^(bits-1)-1), 2^(bits-1)-1]
// and rounding is half away from zero, so quantize(-y) == -quantize(y).
//
// The dual encoding stores one byte per value (sign + 7-bit magnitude of the
// 8-bit index) plus an offset bit. The 4-bit index is recovered from the high
// nibble of the magnitude, incremented by one when the offset bit is set.

#ifndef DYNLSTM_QUANT_HPP_
#define DYNLSTM_QUANT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dynlstm {

enum class Precision : std::uint8_t { Low4, High8 };

constexpr int bits_of(Precision p) { return p == Precision::Low4 ? 4 : 8; }
const char* to_string(Precision p);

// Largest index magnitude representable at `bits`: 2^(bits-1) - 1.
constexpr std::int32_t max_index(int bits) { return (1 << (bits - 1)) - 1; }

// q = alpha / 2^(bits-1). Throws InvalidArgument for alpha <= 0 (or
// non-finite) and for bits outside [1, 8].
double quant_step(double alpha, int bits);

struct QuantParams {
  double alpha = 1.0;
  int bits = 8;
  double step = 1.0 / 128.0;

  // Validated constructor.
  static QuantParams make(double alpha, int bits);
  // alpha = max |v|; an all-zero (or empty) tensor gets alpha = 1.
  static QuantParams for_tensor(std::span<const float> v, int bits);
};

// Largest magnitude in v, or 1.0 when every element is zero.
double tensor_alpha(std::span<const float> v);

struct QIndex {
  std::int32_t value = 0;
  int bits = 8;

  friend bool operator==(const QIndex&, const QIndex&) = default;
};

QIndex quantize(double y, const QuantParams& params);
double dequantize(QIndex i, const QuantParams& params);

// Exact integer inner product with a 32-bit accumulator. Vectors are limited
// to 2^16 elements so that 8-bit x 8-bit products cannot overflow.
inline constexpr std::size_t kMaxDotLength = std::size_t{1} << 16;
std::int32_t dot_int(std::span<const QIndex> w, std::span<const QIndex> x);
std::int32_t dot_int(std::span<const std::int8_t> w,
                     std::span<const std::int8_t> x);

// z * qw * qx: converts an integer accumulator back to a real value.
double rescale(std::int64_t z_int, double qw, double qx);

struct DualIndex {
  bool negative = false;
  std::uint8_t magnitude7 = 0;
  bool offset_bit = false;

  // Sign-magnitude byte as stored in the weight buffer.
  std::uint8_t packed_byte() const {
    return static_cast<std::uint8_t>((negative ? 0x80u : 0u) | magnitude7);
  }
  std::uint8_t high_nibble() const {
    return static_cast<std::uint8_t>(magnitude7 >> 4);
  }

  friend bool operator==(const DualIndex&, const DualIndex&) = default;
};

DualIndex encode_dual(double y, double alpha);
QIndex extract_low(DualIndex d);
QIndex extract_high(DualIndex d);
QIndex extract(DualIndex d, Precision p);

// A tensor in dual encoding together with its scales at both precisions.
struct QuantizedVector {
  std::vector<DualIndex> elements;
  QuantParams params8;
  QuantParams params4;

  // Encodes every element of v against alpha (use tensor_alpha(v) for the
  // tightest scale).
  static QuantizedVector encode(std::span<const float> v, double alpha);

  const QuantParams& params(Precision p) const {
    return p == Precision::Low4 ? params4 : params8;
  }
  // Plain signed indices at the requested precision.
  std::vector<std::int8_t> indices(Precision p) const;
  // Number of elements whose offset bit is set.
  std::size_t offset_count() const;
};

}  // namespace dynlstm

#endif  // DYNLSTM_QUANT_HPP_
