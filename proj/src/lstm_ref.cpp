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

#include "dynlstm/lstm_ref.hpp"

#include <cmath>
#include <string>

#include "dynlstm/errors.hpp"

namespace dynlstm {

const char* to_string(Gate g) {
  switch (g) {
    case Gate::Input: return "input";
    case Gate::Forget: return "forget";
    case Gate::Updater: return "updater";
    case Gate::Output: return "output";
  }
  return "?";
}

Activation activation_of(Gate g) {
  return g == Gate::Updater ? Activation::Tanh : Activation::Sigmoid;
}

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

float apply(Activation a, float x) {
  return a == Activation::Sigmoid ? sigmoid(x) : std::tanh(x);
}

GateWeights GateWeights::zeros(std::size_t cell_size, std::size_t input_size) {
  return GateWeights{Matrix(cell_size, input_size), Matrix(cell_size, cell_size),
                     Vector(cell_size, 0.0f)};
}

LstmLayer LstmLayer::zeros(std::size_t cell_size, std::size_t input_size) {
  LstmLayer layer;
  for (auto& g : layer.gates) g = GateWeights::zeros(cell_size, input_size);
  return layer;
}

void LstmLayer::validate() const {
  const std::size_t cells = cell_size();
  const std::size_t inputs = input_size();
  if (cells == 0 || inputs == 0) {
    throw InvalidArgument("layer: cell_size and input_size must be positive");
  }
  for (Gate g : kGates) {
    const GateWeights& w = gate(g);
    if (w.w_x.rows() != cells || w.w_x.cols() != inputs ||
        w.w_h.rows() != cells || w.w_h.cols() != cells || w.b.size() != cells) {
      throw InvalidArgument(std::string("layer: ") + to_string(g) +
                            " gate dimensions disagree with cell_size " +
                            std::to_string(cells) + " / input_size " +
                            std::to_string(inputs));
    }
  }
}

void LstmModel::validate() const {
  if (layers.empty()) throw InvalidArgument("model: no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    layers[k].validate();
    if (k > 0 && layers[k].input_size() != layers[k - 1].cell_size()) {
      throw InvalidArgument("model: layer " + std::to_string(k) +
                            " input_size " +
                            std::to_string(layers[k].input_size()) +
                            " != layer " + std::to_string(k - 1) +
                            " cell_size " +
                            std::to_string(layers[k - 1].cell_size()));
    }
  }
}

void InputSequence::validate() const {
  if (steps.empty()) throw InvalidArgument("sequence: empty");
  const std::size_t n = steps.front().size();
  if (n == 0) throw InvalidArgument("sequence: zero-width vectors");
  for (std::size_t t = 0; t < steps.size(); ++t) {
    if (steps[t].size() != n) {
      throw InvalidArgument("sequence: step " + std::to_string(t) + " has " +
                            std::to_string(steps[t].size()) +
                            " elements, expected " + std::to_string(n));
    }
  }
}

Vector gate_eval(const GateWeights& g, std::span<const float> x_t,
                 std::span<const float> h_prev, Activation activation) {
  const std::size_t cells = g.b.size();
  if (g.w_x.rows() != cells || g.w_h.rows() != cells ||
      g.w_x.cols() != x_t.size() || g.w_h.cols() != h_prev.size()) {
    throw InvalidArgument("gate_eval: dimension mismatch");
  }
  Vector out(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    float acc = 0.0f;
    const auto wx = g.w_x.row(k);
    for (std::size_t j = 0; j < x_t.size(); ++j) acc += wx[j] * x_t[j];
    const auto wh = g.w_h.row(k);
    for (std::size_t j = 0; j < h_prev.size(); ++j) acc += wh[j] * h_prev[j];
    out[k] = apply(activation, acc + g.b[k]);
  }
  return out;
}

LstmState cell_step(const LstmLayer& layer, std::span<const float> x_t,
                    const LstmState& state) {
  const std::size_t cells = layer.cell_size();
  if (x_t.size() != layer.input_size() || state.c.size() != cells ||
      state.h.size() != cells) {
    throw InvalidArgument("cell_step: dimension mismatch");
  }
  std::array<Vector, kNumGates> act;
  for (Gate g : kGates) {
    act[static_cast<std::size_t>(g)] =
        gate_eval(layer.gate(g), x_t, state.h, activation_of(g));
  }
  const Vector& i = act[0];
  const Vector& f = act[1];
  const Vector& g = act[2];
  const Vector& o = act[3];

  LstmState next = LstmState::zeros(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    next.c[k] = f[k] * state.c[k] + i[k] * g[k];
    next.h[k] = o[k] * std::tanh(next.c[k]);
  }
  return next;
}

LstmTrace run_fp32(const LstmModel& model, const InputSequence& seq) {
  model.validate();
  seq.validate();
  if (seq.width() != model.input_size()) {
    throw InvalidArgument("run_fp32: sequence width " +
                          std::to_string(seq.width()) +
                          " != model input_size " +
                          std::to_string(model.input_size()));
  }
  LstmTrace trace;
  trace.states.resize(model.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const LstmLayer& layer = model.layers[l];
    auto& out = trace.states[l];
    out.reserve(seq.length());
    LstmState state = LstmState::zeros(layer.cell_size());
    for (std::size_t t = 0; t < seq.length(); ++t) {
      std::span<const float> x =
          l == 0 ? std::span<const float>(seq.steps[t])
                 : std::span<const float>(trace.states[l - 1][t].h);
      state = cell_step(layer, x, state);
      out.push_back(state);
    }
  }
  return trace;
}

}  // namespace dynlstm
