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

// Independent reference implementations used as test oracles. None of these
// call into the library's arithmetic.

#ifndef DYNLSTM_TESTS_ORACLES_HPP_
#define DYNLSTM_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dynlstm/lstm_ref.hpp"

namespace dynlstm::oracle {

// Wide-integer dot product.
inline __int128 dot(const std::vector<std::int64_t>& w, const std::vector<std::int64_t>& x) {
  __int128 s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) s += static_cast<__int128>(w[i]) * x[i];
  return s;
}

// Textbook quantizer written from the definition, in long double.
inline std::int64_t quantize(long double y, long double alpha, int bits) {
  const long double step = alpha / std::ldexp(1.0L, bits - 1);
  const long double r = y / step;
  std::int64_t i = static_cast<std::int64_t>(std::floor(std::fabs(r) + 0.5L));
  if (r < 0) i = -i;
  const std::int64_t lim = (std::int64_t{1} << (bits - 1)) - 1;
  return i > lim ? lim : (i < -lim ? -lim : i);
}

// Straight-line LSTM in double, one element at a time.
struct DoubleState {
  std::vector<double> c, h;
};

inline double dsig(double v) { return 1.0 / (1.0 + std::exp(-v)); }

inline DoubleState lstm_step(const LstmLayer& L, const std::vector<double>& x,
                             const DoubleState& s) {
  const std::size_t n = L.cell_size();
  DoubleState out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    double pre[4];
    for (std::size_t g = 0; g < 4; ++g) {
      const GateWeights& w = L.gates[g];
      double a = w.b[k];
      for (std::size_t j = 0; j < x.size(); ++j) a += double{w.w_x(k, j)} * x[j];
      for (std::size_t j = 0; j < n; ++j) a += double{w.w_h(k, j)} * s.h[j];
      pre[g] = a;
    }
    const double i = dsig(pre[0]), f = dsig(pre[1]), g = std::tanh(pre[2]), o = dsig(pre[3]);
    out.c[k] = f * s.c[k] + i * g;
    out.h[k] = o * std::tanh(out.c[k]);
  }
  return out;
}

// [layer][step] states in double.
inline std::vector<std::vector<DoubleState>> lstm_run(const LstmModel& m,
                                                      const InputSequence& seq) {
  std::vector<std::vector<DoubleState>> out(m.layers.size());
  std::vector<DoubleState> state;
  for (const LstmLayer& L : m.layers) {
    state.push_back({std::vector<double>(L.cell_size(), 0.0),
                     std::vector<double>(L.cell_size(), 0.0)});
  }
  for (const Vector& xt : seq.steps) {
    std::vector<double> x(xt.begin(), xt.end());
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      state[l] = lstm_step(m.layers[l], x, state[l]);
      out[l].push_back(state[l]);
      x = state[l].h;
    }
  }
  return out;
}

inline LstmModel random_model(std::size_t layers, std::size_t cell, std::size_t input,
                              std::uint64_t seed, float scale = 0.5f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-scale, scale);
  LstmModel m;
  for (std::size_t l = 0; l < layers; ++l) {
    LstmLayer L = LstmLayer::zeros(cell, l == 0 ? input : cell);
    for (GateWeights& w : L.gates) {
      for (float& v : w.w_x.data()) v = u(rng);
      for (float& v : w.w_h.data()) v = u(rng);
      for (float& v : w.b) v = u(rng);
    }
    m.layers.push_back(std::move(L));
  }
  return m;
}

inline InputSequence random_sequence(std::size_t steps, std::size_t width, std::uint64_t seed,
                                     float scale = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-scale, scale);
  InputSequence s;
  s.steps.assign(steps, Vector(width));
  for (Vector& v : s.steps) {
    for (float& x : v) x = u(rng);
  }
  return s;
}

}  // namespace dynlstm::oracle

#endif  // DYNLSTM_TESTS_ORACLES_HPP_
