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

// Serial inner product (SIP) units.
//
// A dot-product unit holds `lanes` SIPs, each taking `lane_width` weights in
// parallel (8-bit) and one bit of each of the matching `lane_width` input
// indices per cycle. Inputs are serialized sign-magnitude: the sign plane goes
// first and conditionally negates the lane's weight, then the magnitude
// planes follow MSB first and are shift-accumulated. A `bits`-wide input thus
// occupies `bits` cycles per chunk of lanes * lane_width elements.

#ifndef DYNLSTM_SIP_MODEL_HPP_
#define DYNLSTM_SIP_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>

#include "dynlstm/quant.hpp"

namespace dynlstm {

struct SipConfig {
  int lanes = 8;
  int lane_width = 16;
  int reduction_latency = 0;

  std::size_t chunk() const {
    return static_cast<std::size_t>(lanes) * static_cast<std::size_t>(lane_width);
  }
  void validate() const;
};

struct SipResult {
  std::int32_t value = 0;
  std::uint64_t cycles = 0;
  // One per (element, input bit-plane) pair actually processed.
  std::uint64_t bit_ops = 0;
};

// ceil(vector_length / (lanes * lane_width)) * precision + reduction_latency.
std::uint64_t sip_cycles(std::size_t vector_length, Precision precision,
                         const SipConfig& config);
std::uint64_t sip_cycles_bits(std::size_t vector_length, int bits,
                              const SipConfig& config);

// Bit-serial evaluation of sum(w[i] * x[i]); x is the serial operand.
SipResult sip_dot(std::span<const QIndex> w, std::span<const QIndex> x,
                  Precision precision, const SipConfig& config);

// Same machinery for any serial width in [1, 8].
SipResult sip_dot_bits(std::span<const QIndex> w, std::span<const QIndex> x,
                       int bits, const SipConfig& config);

}  // namespace dynlstm

#endif  // DYNLSTM_SIP_MODEL_HPP_
