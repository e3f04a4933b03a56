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

#include "dynlstm/quant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dynlstm/errors.hpp"

namespace dynlstm {

const char* to_string(Precision p) {
  return p == Precision::Low4 ? "low4" : "high8";
}

double quant_step(double alpha, int bits) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("quant_step: alpha must be positive and finite, got " +
                          std::to_string(alpha));
  }
  if (bits < 1 || bits > 8) {
    throw InvalidArgument("quant_step: bits must be in [1, 8], got " +
                          std::to_string(bits));
  }
  return std::ldexp(alpha, -(bits - 1));
}

QuantParams QuantParams::make(double alpha, int bits) {
  return QuantParams{alpha, bits, quant_step(alpha, bits)};
}

double tensor_alpha(std::span<const float> v) {
  double alpha = 0.0;
  for (float x : v) alpha = std::max(alpha, std::fabs(static_cast<double>(x)));
  return alpha > 0.0 ? alpha : 1.0;
}

QuantParams QuantParams::for_tensor(std::span<const float> v, int bits) {
  return make(tensor_alpha(v), bits);
}

QIndex quantize(double y, const QuantParams& params) {
  if (!std::isfinite(y)) {
    throw InvalidArgument("quantize: value is not finite");
  }
  const double limit = max_index(params.bits);
  // std::round is half away from zero.
  const double r = std::clamp(std::round(y / params.step), -limit, limit);
  return QIndex{static_cast<std::int32_t>(r), params.bits};
}

double dequantize(QIndex i, const QuantParams& params) {
  if (i.bits != params.bits) {
    throw InvalidArgument("dequantize: index has " + std::to_string(i.bits) +
                          " bits, params have " + std::to_string(params.bits));
  }
  return static_cast<double>(i.value) * params.step;
}

namespace {

void check_dot_lengths(std::size_t w, std::size_t x) {
  if (w != x) {
    throw InvalidArgument("dot_int: length mismatch (" + std::to_string(w) +
                          " vs " + std::to_string(x) + ")");
  }
  if (w > kMaxDotLength) {
    throw InvalidArgument("dot_int: vector longer than accumulator allows");
  }
}

}  // namespace

std::int32_t dot_int(std::span<const QIndex> w, std::span<const QIndex> x) {
  check_dot_lengths(w.size(), x.size());
  std::int32_t acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i].value * x[i].value;
  return acc;
}

std::int32_t dot_int(std::span<const std::int8_t> w,
                     std::span<const std::int8_t> x) {
  check_dot_lengths(w.size(), x.size());
  std::int32_t acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += static_cast<std::int32_t>(w[i]) * static_cast<std::int32_t>(x[i]);
  }
  return acc;
}

double rescale(std::int64_t z_int, double qw, double qx) {
  if (!(qw > 0.0) || !(qx > 0.0)) {
    throw InvalidArgument("rescale: quantization steps must be positive");
  }
  return static_cast<double>(z_int) * qw * qx;
}

DualIndex encode_dual(double y, double alpha) {
  const QuantParams p8 = QuantParams::make(alpha, 8);
  const QuantParams p4 = QuantParams::make(alpha, 4);
  const QIndex i8 = quantize(y, p8);
  const QIndex i4 = quantize(y, p4);

  DualIndex d;
  d.negative = i8.value < 0;
  d.magnitude7 = static_cast<std::uint8_t>(std::abs(i8.value));
  const int low = std::abs(i4.value);
  const int nibble = d.high_nibble();
  if (low != nibble && low != nibble + 1) {
    // Cannot happen with symmetric clamping and half-away rounding; kept as a
    // hard check because the packed format has no way to express it.
    throw std::logic_error("encode_dual: 4-bit index " + std::to_string(low) +
                           " not reachable from nibble " +
                           std::to_string(nibble));
  }
  d.offset_bit = low != nibble;
  return d;
}

QIndex extract_low(DualIndex d) {
  const int magnitude = d.high_nibble() + (d.offset_bit ? 1 : 0);
  return QIndex{d.negative ? -magnitude : magnitude, 4};
}

QIndex extract_high(DualIndex d) {
  const int magnitude = d.magnitude7;
  return QIndex{d.negative ? -magnitude : magnitude, 8};
}

QIndex extract(DualIndex d, Precision p) {
  return p == Precision::Low4 ? extract_low(d) : extract_high(d);
}

QuantizedVector QuantizedVector::encode(std::span<const float> v,
                                        double alpha) {
  QuantizedVector out;
  out.params8 = QuantParams::make(alpha, 8);
  out.params4 = QuantParams::make(alpha, 4);
  out.elements.reserve(v.size());
  for (float x : v) out.elements.push_back(encode_dual(x, alpha));
  return out;
}

std::vector<std::int8_t> QuantizedVector::indices(Precision p) const {
  std::vector<std::int8_t> out(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    out[i] = static_cast<std::int8_t>(extract(elements[i], p).value);
  }
  return out;
}

std::size_t QuantizedVector::offset_count() const {
  return static_cast<std::size_t>(
      std::count_if(elements.begin(), elements.end(),
                    [](const DualIndex& d) { return d.offset_bit; }));
}

}  // namespace dynlstm
