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

// Full-precision LSTM cell (no peepholes, no projection):
//
//   i_t = sigmoid(W_ix x_t + W_ih h_{t-1} + b_i)
//   f_t = sigmoid(W_fx x_t + W_fh h_{t-1} + b_f)
//   g_t = tanh   (W_gx x_t + W_gh h_{t-1} + b_g)
//   o_t = sigmoid(W_ox x_t + W_oh h_{t-1} + b_o)
//   c_t = f_t * c_{t-1} + i_t * g_t
//   h_t = o_t * tanh(c_t)
//
// All arithmetic is FP32. This is the reference every quantized run is
// measured against.

#ifndef DYNLSTM_LSTM_REF_HPP_
#define DYNLSTM_LSTM_REF_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "dynlstm/tensor.hpp"

namespace dynlstm {

enum class Gate : std::size_t { Input = 0, Forget = 1, Updater = 2, Output = 3 };
inline constexpr std::size_t kNumGates = 4;
inline constexpr std::array<Gate, kNumGates> kGates = {
    Gate::Input, Gate::Forget, Gate::Updater, Gate::Output};
const char* to_string(Gate g);

enum class Activation { Sigmoid, Tanh };
Activation activation_of(Gate g);

float sigmoid(float x);
float apply(Activation a, float x);

struct GateWeights {
  Matrix w_x;  // [cell_size x input_size]
  Matrix w_h;  // [cell_size x cell_size]
  Vector b;    // [cell_size]

  static GateWeights zeros(std::size_t cell_size, std::size_t input_size);
};

struct LstmLayer {
  std::array<GateWeights, kNumGates> gates;

  GateWeights& gate(Gate g) { return gates[static_cast<std::size_t>(g)]; }
  const GateWeights& gate(Gate g) const {
    return gates[static_cast<std::size_t>(g)];
  }
  std::size_t cell_size() const { return gates[0].b.size(); }
  std::size_t input_size() const { return gates[0].w_x.cols(); }

  static LstmLayer zeros(std::size_t cell_size, std::size_t input_size);
  // Throws InvalidArgument unless all four gates agree on dimensions.
  void validate() const;
};

struct LstmModel {
  std::vector<LstmLayer> layers;

  std::size_t input_size() const {
    return layers.empty() ? 0 : layers.front().input_size();
  }
  // Throws InvalidArgument on an empty model, inconsistent gates, or a layer
  // whose input size differs from the previous layer's cell size.
  void validate() const;
};

struct LstmState {
  Vector c;
  Vector h;

  static LstmState zeros(std::size_t cell_size) {
    return LstmState{Vector(cell_size, 0.0f), Vector(cell_size, 0.0f)};
  }
  friend bool operator==(const LstmState&, const LstmState&) = default;
};

struct InputSequence {
  std::vector<Vector> steps;

  std::size_t length() const { return steps.size(); }
  std::size_t width() const { return steps.empty() ? 0 : steps.front().size(); }
  // Non-empty with uniform vector length.
  void validate() const;
};

// Per-layer, per-step states: states[layer][step].
struct LstmTrace {
  std::vector<std::vector<LstmState>> states;

  friend bool operator==(const LstmTrace&, const LstmTrace&) = default;
};

Vector gate_eval(const GateWeights& g, std::span<const float> x_t,
                 std::span<const float> h_prev, Activation activation);

LstmState cell_step(const LstmLayer& layer, std::span<const float> x_t,
                    const LstmState& state);

LstmTrace run_fp32(const LstmModel& model, const InputSequence& seq);

}  // namespace dynlstm

#endif  // DYNLSTM_LSTM_REF_HPP_
