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

#include "dynlstm/sip_model.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "dynlstm/errors.hpp"

namespace dynlstm {

void SipConfig::validate() const {
  if (lanes < 1 || lane_width < 1) {
    throw InvalidArgument("sip config: lanes and lane_width must be >= 1");
  }
  if (reduction_latency < 0) {
    throw InvalidArgument("sip config: reduction_latency must be >= 0");
  }
}

std::uint64_t sip_cycles_bits(std::size_t vector_length, int bits,
                              const SipConfig& config) {
  config.validate();
  if (vector_length == 0) {
    throw InvalidArgument("sip_cycles: vector_length must be >= 1");
  }
  if (bits < 1 || bits > 8) {
    throw InvalidArgument("sip_cycles: bits must be in [1, 8]");
  }
  const std::uint64_t chunks = (vector_length + config.chunk() - 1) / config.chunk();
  return chunks * static_cast<std::uint64_t>(bits) +
         static_cast<std::uint64_t>(config.reduction_latency);
}

std::uint64_t sip_cycles(std::size_t vector_length, Precision precision,
                         const SipConfig& config) {
  return sip_cycles_bits(vector_length, bits_of(precision), config);
}

SipResult sip_dot(std::span<const QIndex> w, std::span<const QIndex> x,
                  Precision precision, const SipConfig& config) {
  return sip_dot_bits(w, x, bits_of(precision), config);
}

SipResult sip_dot_bits(std::span<const QIndex> w, std::span<const QIndex> x,
                       int bits, const SipConfig& config) {
  config.validate();
  if (w.size() != x.size()) {
    throw InvalidArgument("sip_dot: length mismatch (" +
                          std::to_string(w.size()) + " vs " +
                          std::to_string(x.size()) + ")");
  }
  if (w.empty()) throw InvalidArgument("sip_dot: empty vectors");
  if (w.size() > kMaxDotLength) {
    throw InvalidArgument("sip_dot: vector longer than accumulator allows");
  }
  if (bits < 1 || bits > 8) {
    throw InvalidArgument("sip_dot: bits must be in [1, 8]");
  }
  const std::int32_t x_limit = max_index(bits);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i].value) > x_limit) {
      throw InvalidArgument("sip_dot: input index " + std::to_string(x[i].value) +
                            " at position " + std::to_string(i) +
                            " does not fit " + std::to_string(bits) + " bits");
    }
    if (std::abs(w[i].value) > max_index(8)) {
      throw InvalidArgument("sip_dot: weight index " + std::to_string(w[i].value) +
                            " at position " + std::to_string(i) +
                            " does not fit 8 bits");
    }
  }

  SipResult result;
  const std::size_t n = x.size();
  const std::size_t chunk = config.chunk();
  const std::size_t width = static_cast<std::size_t>(config.lane_width);
  const int magnitude_planes = bits - 1;
  std::vector<std::int32_t> lane_weight(width);
  std::vector<std::uint32_t> lane_magnitude(width);

  std::int32_t total = 0;
  for (std::size_t base = 0; base < n; base += chunk) {
    std::int32_t chunk_sum = 0;
    for (int lane = 0; lane < config.lanes; ++lane) {
      const std::size_t lane_base = base + static_cast<std::size_t>(lane) * width;
      if (lane_base >= n) break;
      const std::size_t count = std::min(width, n - lane_base);

      // Sign plane: the lane latches its weights, negated where x < 0.
      for (std::size_t j = 0; j < count; ++j) {
        const QIndex xi = x[lane_base + j];
        lane_weight[j] = xi.value < 0 ? -w[lane_base + j].value : w[lane_base + j].value;
        lane_magnitude[j] = static_cast<std::uint32_t>(std::abs(xi.value));
      }
      result.bit_ops += count;

      // Magnitude planes, MSB first.
      std::int32_t acc = 0;
      for (int plane = magnitude_planes - 1; plane >= 0; --plane) {
        std::int32_t partial = 0;
        for (std::size_t j = 0; j < count; ++j) {
          if ((lane_magnitude[j] >> plane) & 1u) partial += lane_weight[j];
        }
        acc = acc * 2 + partial;
        result.bit_ops += count;
      }
      chunk_sum += acc;
    }
    total += chunk_sum;
  }

  result.value = total;
  result.cycles = sip_cycles_bits(n, bits, config);
  return result;
}

}  // namespace dynlstm
