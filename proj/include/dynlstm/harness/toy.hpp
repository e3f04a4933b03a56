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

// Small deterministic models and sequences with known cell-state behaviour.
//
//   flat    constant input; every cell state settles to a fixed point.
//   peaky   element 0 of layer 0 sits on a noisy plateau and is kicked by
//           short input spikes on channel 0. Its spike weights are chosen so
//           that 4-bit quantization misrepresents them badly while 8 bits
//           does not.
//   random  weights and biases uniform in [-0.5, 0.5], inputs uniform in
//           [-1, 1].

#ifndef DYNLSTM_HARNESS_TOY_HPP_
#define DYNLSTM_HARNESS_TOY_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dynlstm/lstm_ref.hpp"

namespace dynlstm::harness {

enum class ToyKind { Flat, Peaky, Random };
const char* to_string(ToyKind k);
ToyKind parse_toy_kind(const std::string& s);

struct ToyDims {
  std::size_t layers = 1;
  std::size_t cell = 8;
  std::size_t input = 8;
  std::size_t steps = 200;

  // "LAYERSxCELLxINPUTxSTEPS", e.g. "1x8x8x200".
  static ToyDims parse(const std::string& s);
  std::string to_string() const;
};

struct Toy {
  LstmModel model;
  InputSequence seq;
  // Peaky only: first step of each injected spike, and the driven element.
  std::vector<std::size_t> spike_steps;
  std::size_t driven_element = 0;
};

inline constexpr std::size_t kPeakySpikes = 10;
inline constexpr std::size_t kPeakySpikeWidth = 3;

Toy gen_toy(ToyKind kind, const ToyDims& dims, std::uint64_t seed);

}  // namespace dynlstm::harness

#endif  // DYNLSTM_HARNESS_TOY_HPP_
