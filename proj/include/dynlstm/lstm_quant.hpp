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

// Quantized LSTM evaluation with per-element precision.
//
// Element k of a layer is the k-th neuron of each of the four gates plus the
// k-th cell-state slot; all four neurons are evaluated at the same precision.
// Matrix-vector products run on integer indices; everything after the dot
// products (rescale, bias, activations, cell update) is floating point.

#ifndef DYNLSTM_LSTM_QUANT_HPP_
#define DYNLSTM_LSTM_QUANT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dynlstm/lstm_ref.hpp"
#include "dynlstm/pdu.hpp"
#include "dynlstm/quant.hpp"

namespace dynlstm {

// A weight matrix in dual encoding, with the plain indices at both precisions
// unpacked once for the inner loops.
struct QuantizedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  QuantizedVector values;  // row-major
  std::vector<std::int8_t> low;
  std::vector<std::int8_t> high;

  static QuantizedMatrix encode(const Matrix& m);

  std::span<const std::int8_t> row(std::size_t r, Precision p) const {
    const auto& v = p == Precision::Low4 ? low : high;
    return {v.data() + r * cols, cols};
  }
  const QuantParams& params(Precision p) const { return values.params(p); }
};

struct QuantizedGate {
  QuantizedMatrix w_x;
  QuantizedMatrix w_h;
  Vector b;  // biases stay FP32
};

struct QuantizedLayer {
  std::array<QuantizedGate, kNumGates> gates;
  std::size_t cell_size = 0;
  std::size_t input_size = 0;

  const QuantizedGate& gate(Gate g) const {
    return gates[static_cast<std::size_t>(g)];
  }
  // Weights touched when evaluating one element (all four gates).
  std::size_t element_fan_in() const {
    return kNumGates * (input_size + cell_size);
  }
};

struct QuantizedModel {
  std::vector<QuantizedLayer> layers;

  std::size_t input_size() const {
    return layers.empty() ? 0 : layers.front().input_size;
  }
  std::size_t total_elements() const;
};

// Per-tensor alpha = max |w| for every gate and connection type.
QuantizedModel quantize_model(const LstmModel& model);

// Hardware activity for one layer over one time step.
struct StepActivity {
  std::uint64_t weight_bytes = 0;        // 8-bit fetches
  std::uint64_t weight_nibbles = 0;      // 4-bit fetches
  std::uint64_t weight_offset_bits = 0;  // offset bits read with nibbles
  std::uint64_t input_elems_fetched = 0;
  std::uint64_t input_elems_adjusted = 0;
  std::uint64_t sip_bit_ops = 0;
  std::uint64_t mu_add = 0;
  std::uint64_t mu_mul = 0;
  std::uint64_t mu_exp = 0;
  std::uint64_t pdu_updates = 0;
  std::uint64_t elements_low = 0;   // element evaluations at 4 bits
  std::uint64_t elements_high = 0;  // element evaluations at 8 bits

  StepActivity& operator+=(const StepActivity& o);
  friend StepActivity operator+(StepActivity a, const StepActivity& b) {
    return a += b;
  }
  friend bool operator==(const StepActivity&, const StepActivity&) = default;
};

// x_t and h_{t-1} of one layer step in dual encoding.
struct QuantizedInputs {
  QuantizedVector x;
  QuantizedVector h;
  std::vector<std::int8_t> x_low, x_high, h_low, h_high;

  // x uses alpha = max |x|; h uses alpha = 1 since it lies in (-1, 1).
  static QuantizedInputs encode(std::span<const float> x,
                                std::span<const float> h_prev);

  std::span<const std::int8_t> x_indices(Precision p) const {
    return p == Precision::Low4 ? x_low : x_high;
  }
  std::span<const std::int8_t> h_indices(Precision p) const {
    return p == Precision::Low4 ? h_low : h_high;
  }
};

// Pre-activations of the four gate neurons of element k, indexed by Gate.
// Adds the element's fetch/SIP/MU activity to `activity` when non-null.
std::array<double, kNumGates> neuron_eval(const QuantizedLayer& layer,
                                          std::size_t k, Precision precision,
                                          const QuantizedInputs& inputs,
                                          StepActivity* activity = nullptr);

enum class ModeKind : std::uint8_t { Static8, Static4, Dynamic, Random };

struct Mode {
  ModeKind kind = ModeKind::Static8;
  double low_probability = 0.33;  // Random only
  std::uint64_t seed = 0;         // Random only

  static Mode static8() { return Mode{ModeKind::Static8}; }
  static Mode static4() { return Mode{ModeKind::Static4}; }
  static Mode dynamic() { return Mode{ModeKind::Dynamic}; }
  static Mode random(double p, std::uint64_t seed) {
    return Mode{ModeKind::Random, p, seed};
  }

  std::string name() const;
  // Accepts static8, static4, dynamic, random.
  static Mode parse(const std::string& name, std::uint64_t seed = 0);
};

template <typename T>
using LayerStepGrid = std::vector<std::vector<std::vector<T>>>;  // [layer][step][element]

struct QuantRun {
  Mode mode;
  LstmTrace trace;
  LayerStepGrid<Precision> precision;  // precision used at each step
  // PDU phase after observing each step's cell state. Static and random modes
  // run the trackers in observe-only mode so peaks can still be located.
  LayerStepGrid<Phase> phase;
  std::vector<std::vector<StepActivity>> activity;  // [layer][step]

  std::size_t steps() const {
    return trace.states.empty() ? 0 : trace.states.front().size();
  }
  StepActivity total_activity() const;
  // Fraction of element evaluations done at 4 bits.
  double low_precision_usage() const;
};

QuantRun run_quantized(const QuantizedModel& model, const InputSequence& seq,
                       const Mode& mode, const PduConfig& pdu_config);

struct ErrorStats {
  double peak_mean = 0.0;
  double stable_mean = 0.0;
  std::size_t peak_count = 0;
  std::size_t stable_count = 0;
};

inline constexpr double kDefaultErrorDenominator = 1e-3;

// Relative cell-state error |c_q - c_fp| / max(|c_fp|, eps_denom), averaged
// separately over steps the phase trace marks InPeak and all other steps.
ErrorStats relative_error_stats(const LstmTrace& fp_trace,
                                const LstmTrace& q_trace,
                                const LayerStepGrid<Phase>& phase_trace,
                                double eps_denom = kDefaultErrorDenominator);

// Mean |c_q - c_fp| over every layer, step and element.
double mean_abs_cell_error(const LstmTrace& fp_trace, const LstmTrace& q_trace);

}  // namespace dynlstm

#endif  // DYNLSTM_LSTM_QUANT_HPP_
