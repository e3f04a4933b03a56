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

#include "dynlstm/harness/toy.hpp"

#include <algorithm>
#include <charconv>
#include <random>

#include "dynlstm/errors.hpp"
#include "dynlstm/pdu.hpp"

namespace dynlstm::harness {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [lo, hi); bit-identical on every standard library.
  float uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return static_cast<float>(lo + (hi - lo) * u);
  }

 private:
  std::mt19937_64 engine_;
};

void fill(std::span<float> v, Rng& rng, double lo, double hi) {
  for (float& x : v) x = rng.uniform(lo, hi);
}

LstmLayer random_layer(std::size_t cells, std::size_t inputs, Rng& rng, double scale) {
  LstmLayer layer = LstmLayer::zeros(cells, inputs);
  for (Gate g : kGates) {
    GateWeights& w = layer.gate(g);
    fill(w.w_x.data(), rng, -scale, scale);
    fill(w.w_h.data(), rng, -scale, scale);
    fill(w.b, rng, -scale, scale);
  }
  return layer;
}

LstmModel random_model(const ToyDims& dims, Rng& rng, double scale) {
  LstmModel model;
  for (std::size_t l = 0; l < dims.layers; ++l) {
    model.layers.push_back(
        random_layer(dims.cell, l == 0 ? dims.input : dims.cell, rng, scale));
  }
  return model;
}

Toy gen_random(const ToyDims& dims, Rng& rng) {
  Toy toy;
  toy.model = random_model(dims, rng, 0.5);
  toy.seq.steps.assign(dims.steps, Vector(dims.input));
  for (auto& v : toy.seq.steps) fill(v, rng, -1.0, 1.0);
  return toy;
}

Toy gen_flat(const ToyDims& dims, Rng& rng) {
  Toy toy;
  toy.model = random_model(dims, rng, 0.5);
  Vector x(dims.input);
  fill(x, rng, -1.0, 1.0);
  toy.seq.steps.assign(dims.steps, x);
  return toy;
}

// Peaky construction, layer 0:
//  - channel 0 carries the spikes (0 outside them);
//  - channel 1 is held at 1.0 and has no weights, pinning the input scale;
//  - channels 2.. hold fixed levels on the 1/8 grid;
//  - every gate's largest weight is the element-0 spike weight (magnitude 1),
//    the rest sit on the 1/8 grid, and recurrent weights are zero.
// Between spikes both precisions reproduce the FP32 pre-activations exactly,
// so quantization error is concentrated on the spikes.
constexpr float kSpikeAmplitude = 2.0f;
constexpr int kBackgroundSteps = 2;  // background weights in [-2/8, 2/8]
constexpr double kBiasScale = 0.3;
constexpr float kDrivenForgetBias = -2.0f;
constexpr std::size_t kSpikeGap = 4;

float grid_value(Rng& rng, int max_steps) {
  const int k = static_cast<int>(rng.uniform(-max_steps, max_steps + 1));
  return static_cast<float>(std::clamp(k, -max_steps, max_steps)) / 8.0f;
}

Toy gen_peaky(const ToyDims& dims, Rng& rng) {
  if (dims.input < 3) throw InvalidArgument("peaky toy needs input >= 3");
  Toy toy;
  toy.driven_element = 0;
  LstmLayer& layer0 = toy.model.layers.emplace_back(LstmLayer::zeros(dims.cell, dims.input));
  for (Gate g : kGates) {
    GateWeights& w = layer0.gate(g);
    for (std::size_t k = 0; k < dims.cell; ++k) {
      for (std::size_t j = 2; j < dims.input; ++j) w.w_x(k, j) = grid_value(rng, kBackgroundSteps);
    }
    fill(w.b, rng, -kBiasScale, kBiasScale);
    w.w_x(0, 0) = g == Gate::Forget ? -1.0f : 1.0f;
  }
  // Short memory on element 0 so it settles between spikes.
  layer0.gate(Gate::Forget).b[0] = kDrivenForgetBias;
  for (std::size_t l = 1; l < dims.layers; ++l) {
    toy.model.layers.push_back(random_layer(dims.cell, dims.cell, rng, 0.5));
  }

  Vector level(dims.input, 0.0f);
  level[1] = 1.0f;
  for (std::size_t j = 2; j < dims.input; ++j) level[j] = grid_value(rng, 7);
  toy.seq.steps.assign(dims.steps, level);

  // Start each spike at a step where the default detector for this length is
  // in its Stable phase, tracking element 0 on the FP32 trajectory.
  const PduConfig pdu = PduConfig::for_sequence(dims.steps);
  ElementTracker tracker = ElementTracker::initial(pdu);
  LstmState state = LstmState::zeros(dims.cell);
  std::size_t earliest = 0;
  std::size_t spike_end = 0;
  for (std::size_t t = 0; t < dims.steps; ++t) {
    if (toy.spike_steps.size() < kPeakySpikes && t >= earliest &&
        t + kPeakySpikeWidth <= dims.steps && tracker.phase == Phase::Stable) {
      toy.spike_steps.push_back(t);
      spike_end = t + kPeakySpikeWidth;
      earliest = spike_end + kSpikeGap;
    }
    if (t < spike_end) toy.seq.steps[t][0] = kSpikeAmplitude;
    state = cell_step(toy.model.layers[0], toy.seq.steps[t], state);
    pdu_observe(tracker, pdu, state.c[0]);
  }
  return toy;
}

}  // namespace

const char* to_string(ToyKind k) {
  switch (k) {
    case ToyKind::Flat: return "flat";
    case ToyKind::Peaky: return "peaky";
    case ToyKind::Random: return "random";
  }
  return "?";
}

ToyKind parse_toy_kind(const std::string& s) {
  if (s == "flat") return ToyKind::Flat;
  if (s == "peaky") return ToyKind::Peaky;
  if (s == "random") return ToyKind::Random;
  throw InvalidArgument("unknown toy kind '" + s + "' (expected flat, peaky or random)");
}

ToyDims ToyDims::parse(const std::string& s) {
  std::size_t values[4];
  std::size_t n = 0;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  while (n < 4) {
    const auto [next, ec] = std::from_chars(p, end, values[n]);
    if (ec != std::errc() || values[n] == 0) break;
    ++n;
    p = next;
    if (p == end || *p != 'x') break;
    ++p;
  }
  if (n != 4 || p != end) {
    throw InvalidArgument("dims must be LAYERSxCELLxINPUTxSTEPS with positive values, got '" +
                          s + "'");
  }
  return ToyDims{values[0], values[1], values[2], values[3]};
}

std::string ToyDims::to_string() const {
  return std::to_string(layers) + "x" + std::to_string(cell) + "x" +
         std::to_string(input) + "x" + std::to_string(steps);
}

Toy gen_toy(ToyKind kind, const ToyDims& dims, std::uint64_t seed) {
  if (dims.layers == 0 || dims.cell == 0 || dims.input == 0 || dims.steps == 0) {
    throw InvalidArgument("toy dimensions must be positive");
  }
  Rng rng(seed);
  switch (kind) {
    case ToyKind::Flat: return gen_flat(dims, rng);
    case ToyKind::Peaky: return gen_peaky(dims, rng);
    case ToyKind::Random: return gen_random(dims, rng);
  }
  throw InvalidArgument("unknown toy kind");
}

}  // namespace dynlstm::harness
