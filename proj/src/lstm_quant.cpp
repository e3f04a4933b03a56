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

#include "dynlstm/lstm_quant.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dynlstm/errors.hpp"

namespace dynlstm {

namespace {

// MU work per gate neuron: two rescale multiplies (forward and recurrent, the
// two scales are pre-multiplied), combine + bias adds, one activation.
constexpr std::uint64_t kMuMulPerNeuron = 2;
constexpr std::uint64_t kMuAddPerNeuron = 2;
constexpr std::uint64_t kMuExpPerNeuron = 1;
// MU work per element: f*c, i*g, o*tanh(c), the sum, tanh(c), and the
// multiply that quantizes h.
constexpr std::uint64_t kMuMulPerElement = 4;
constexpr std::uint64_t kMuAddPerElement = 1;
constexpr std::uint64_t kMuExpPerElement = 1;

// Uniform double in [0, 1) from the top 53 bits; unlike the std
// distributions this is identical across standard library implementations.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

QuantizedMatrix QuantizedMatrix::encode(const Matrix& m) {
  QuantizedMatrix q;
  q.rows = m.rows();
  q.cols = m.cols();
  q.values = QuantizedVector::encode(m.data(), tensor_alpha(m.data()));
  q.low = q.values.indices(Precision::Low4);
  q.high = q.values.indices(Precision::High8);
  return q;
}

std::size_t QuantizedModel::total_elements() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.cell_size;
  return n;
}

QuantizedModel quantize_model(const LstmModel& model) {
  model.validate();
  QuantizedModel q;
  q.layers.reserve(model.layers.size());
  for (const LstmLayer& layer : model.layers) {
    QuantizedLayer ql;
    ql.cell_size = layer.cell_size();
    ql.input_size = layer.input_size();
    for (Gate g : kGates) {
      const GateWeights& w = layer.gate(g);
      QuantizedGate& qg = ql.gates[static_cast<std::size_t>(g)];
      qg.w_x = QuantizedMatrix::encode(w.w_x);
      qg.w_h = QuantizedMatrix::encode(w.w_h);
      qg.b = w.b;
    }
    q.layers.push_back(std::move(ql));
  }
  return q;
}

StepActivity& StepActivity::operator+=(const StepActivity& o) {
  weight_bytes += o.weight_bytes;
  weight_nibbles += o.weight_nibbles;
  weight_offset_bits += o.weight_offset_bits;
  input_elems_fetched += o.input_elems_fetched;
  input_elems_adjusted += o.input_elems_adjusted;
  sip_bit_ops += o.sip_bit_ops;
  mu_add += o.mu_add;
  mu_mul += o.mu_mul;
  mu_exp += o.mu_exp;
  pdu_updates += o.pdu_updates;
  elements_low += o.elements_low;
  elements_high += o.elements_high;
  return *this;
}

QuantizedInputs QuantizedInputs::encode(std::span<const float> x,
                                        std::span<const float> h_prev) {
  QuantizedInputs in;
  in.x = QuantizedVector::encode(x, tensor_alpha(x));
  in.h = QuantizedVector::encode(h_prev, 1.0);
  in.x_low = in.x.indices(Precision::Low4);
  in.x_high = in.x.indices(Precision::High8);
  in.h_low = in.h.indices(Precision::Low4);
  in.h_high = in.h.indices(Precision::High8);
  return in;
}

std::array<double, kNumGates> neuron_eval(const QuantizedLayer& layer,
                                          std::size_t k, Precision precision,
                                          const QuantizedInputs& inputs,
                                          StepActivity* activity) {
  if (k >= layer.cell_size) {
    throw InvalidArgument("neuron_eval: element " + std::to_string(k) +
                          " out of range for cell_size " +
                          std::to_string(layer.cell_size));
  }
  if (inputs.x.elements.size() != layer.input_size ||
      inputs.h.elements.size() != layer.cell_size) {
    throw InvalidArgument("neuron_eval: input dimensions do not match layer");
  }
  const auto x = inputs.x_indices(precision);
  const auto h = inputs.h_indices(precision);
  const double qx = inputs.x.params(precision).step;
  const double qh = inputs.h.params(precision).step;

  std::array<double, kNumGates> pre{};
  for (Gate g : kGates) {
    const QuantizedGate& qg = layer.gate(g);
    const std::int32_t zx = dot_int(qg.w_x.row(k, precision), x);
    const std::int32_t zh = dot_int(qg.w_h.row(k, precision), h);
    pre[static_cast<std::size_t>(g)] =
        rescale(zx, qg.w_x.params(precision).step, qx) +
        rescale(zh, qg.w_h.params(precision).step, qh) +
        static_cast<double>(qg.b[k]);
  }

  if (activity != nullptr) {
    const std::uint64_t fan_in = layer.element_fan_in();
    if (precision == Precision::Low4) {
      activity->weight_nibbles += fan_in;
      activity->weight_offset_bits += fan_in;
      ++activity->elements_low;
    } else {
      activity->weight_bytes += fan_in;
      ++activity->elements_high;
    }
    activity->sip_bit_ops += fan_in * static_cast<std::uint64_t>(bits_of(precision));
    activity->mu_mul += kNumGates * kMuMulPerNeuron;
    activity->mu_add += kNumGates * kMuAddPerNeuron;
    activity->mu_exp += kNumGates * kMuExpPerNeuron;
  }
  return pre;
}

std::string Mode::name() const {
  switch (kind) {
    case ModeKind::Static8: return "static8";
    case ModeKind::Static4: return "static4";
    case ModeKind::Dynamic: return "dynamic";
    case ModeKind::Random: return "random";
  }
  return "?";
}

Mode Mode::parse(const std::string& name, std::uint64_t seed) {
  if (name == "static8") return static8();
  if (name == "static4") return static4();
  if (name == "dynamic") return dynamic();
  if (name == "random") return random(0.33, seed);
  throw InvalidArgument("unknown mode '" + name +
                        "' (expected static8, static4, dynamic or random)");
}

StepActivity QuantRun::total_activity() const {
  StepActivity total;
  for (const auto& layer : activity) {
    for (const auto& a : layer) total += a;
  }
  return total;
}

double QuantRun::low_precision_usage() const {
  const StepActivity t = total_activity();
  const std::uint64_t n = t.elements_low + t.elements_high;
  return n == 0 ? 0.0 : static_cast<double>(t.elements_low) / static_cast<double>(n);
}

QuantRun run_quantized(const QuantizedModel& model, const InputSequence& seq,
                       const Mode& mode, const PduConfig& pdu_config) {
  if (model.layers.empty()) throw InvalidArgument("run_quantized: empty model");
  seq.validate();
  pdu_config.validate();
  if (seq.width() != model.input_size()) {
    throw InvalidArgument("run_quantized: sequence width " +
                          std::to_string(seq.width()) +
                          " != model input_size " +
                          std::to_string(model.input_size()));
  }
  if (mode.kind == ModeKind::Random &&
      !(mode.low_probability >= 0.0 && mode.low_probability <= 1.0)) {
    throw InvalidArgument("run_quantized: random-mode probability outside [0, 1]");
  }

  const std::size_t steps = seq.length();
  const std::size_t layers = model.layers.size();
  QuantRun run;
  run.mode = mode;
  run.trace.states.resize(layers);
  run.precision.resize(layers);
  run.phase.resize(layers);
  run.activity.resize(layers);
  std::mt19937_64 rng(mode.seed);

  for (std::size_t l = 0; l < layers; ++l) {
    const QuantizedLayer& layer = model.layers[l];
    const std::size_t cells = layer.cell_size;
    const std::uint64_t cu_fan_in = layer.input_size + layer.cell_size;

    std::vector<ElementTracker> trackers(cells, ElementTracker::initial(pdu_config));
    std::vector<Precision> next(cells);
    for (std::size_t k = 0; k < cells; ++k) next[k] = trackers[k].next_precision;

    LstmState state = LstmState::zeros(cells);
    auto& out = run.trace.states[l];
    out.reserve(steps);
    run.precision[l].reserve(steps);
    run.phase[l].reserve(steps);
    run.activity[l].reserve(steps);

    for (std::size_t t = 0; t < steps; ++t) {
      std::span<const float> x =
          l == 0 ? std::span<const float>(seq.steps[t])
                 : std::span<const float>(run.trace.states[l - 1][t].h);
      const QuantizedInputs inputs = QuantizedInputs::encode(x, state.h);

      std::vector<Precision> used(cells);
      for (std::size_t k = 0; k < cells; ++k) {
        switch (mode.kind) {
          case ModeKind::Static8: used[k] = Precision::High8; break;
          case ModeKind::Static4: used[k] = Precision::Low4; break;
          case ModeKind::Dynamic: used[k] = next[k]; break;
          case ModeKind::Random:
            used[k] = uniform01(rng) < mode.low_probability ? Precision::Low4
                                                            : Precision::High8;
            break;
        }
      }

      StepActivity act;
      // Every CU fetches the whole input vector at 8 bits; when any element
      // runs at 4 bits the offset-adjusted copy is built once and cached.
      act.input_elems_fetched = kNumGates * cu_fan_in;
      if (std::find(used.begin(), used.end(), Precision::Low4) != used.end()) {
        act.input_elems_adjusted =
            kNumGates * (inputs.x.offset_count() + inputs.h.offset_count());
      }

      LstmState next_state = LstmState::zeros(cells);
      for (std::size_t k = 0; k < cells; ++k) {
        const auto pre = neuron_eval(layer, k, used[k], inputs, &act);
        const float i = sigmoid(static_cast<float>(pre[0]));
        const float f = sigmoid(static_cast<float>(pre[1]));
        const float g = std::tanh(static_cast<float>(pre[2]));
        const float o = sigmoid(static_cast<float>(pre[3]));
        next_state.c[k] = f * state.c[k] + i * g;
        next_state.h[k] = o * std::tanh(next_state.c[k]);
      }
      act.mu_mul += cells * kMuMulPerElement;
      act.mu_add += cells * kMuAddPerElement;
      act.mu_exp += cells * kMuExpPerElement;

      std::vector<Phase> phases(cells);
      for (std::size_t k = 0; k < cells; ++k) {
        next[k] = pdu_observe(trackers[k], pdu_config, next_state.c[k]);
        phases[k] = trackers[k].phase;
      }
      if (mode.kind == ModeKind::Dynamic) act.pdu_updates = cells;

      state = std::move(next_state);
      out.push_back(state);
      run.precision[l].push_back(std::move(used));
      run.phase[l].push_back(std::move(phases));
      run.activity[l].push_back(act);
    }
  }
  return run;
}

namespace {

void check_aligned(const LstmTrace& a, const LstmTrace& b) {
  if (a.states.size() != b.states.size()) {
    throw InvalidArgument("traces have different layer counts");
  }
  for (std::size_t l = 0; l < a.states.size(); ++l) {
    if (a.states[l].size() != b.states[l].size()) {
      throw InvalidArgument("traces have different step counts at layer " +
                            std::to_string(l));
    }
    for (std::size_t t = 0; t < a.states[l].size(); ++t) {
      if (a.states[l][t].c.size() != b.states[l][t].c.size()) {
        throw InvalidArgument("traces have different cell sizes at layer " +
                              std::to_string(l));
      }
    }
  }
}

}  // namespace

ErrorStats relative_error_stats(const LstmTrace& fp_trace,
                                const LstmTrace& q_trace,
                                const LayerStepGrid<Phase>& phase_trace,
                                double eps_denom) {
  check_aligned(fp_trace, q_trace);
  if (phase_trace.size() != fp_trace.states.size()) {
    throw InvalidArgument("relative_error_stats: phase trace layer count mismatch");
  }
  ErrorStats s;
  double peak_sum = 0.0;
  double stable_sum = 0.0;
  for (std::size_t l = 0; l < fp_trace.states.size(); ++l) {
    if (phase_trace[l].size() != fp_trace.states[l].size()) {
      throw InvalidArgument("relative_error_stats: phase trace step count mismatch");
    }
    for (std::size_t t = 0; t < fp_trace.states[l].size(); ++t) {
      const Vector& cf = fp_trace.states[l][t].c;
      const Vector& cq = q_trace.states[l][t].c;
      if (phase_trace[l][t].size() != cf.size()) {
        throw InvalidArgument("relative_error_stats: phase trace width mismatch");
      }
      for (std::size_t k = 0; k < cf.size(); ++k) {
        const double ref = cf[k];
        const double err = std::fabs(static_cast<double>(cq[k]) - ref) /
                           std::max(std::fabs(ref), eps_denom);
        if (phase_trace[l][t][k] == Phase::InPeak) {
          peak_sum += err;
          ++s.peak_count;
        } else {
          stable_sum += err;
          ++s.stable_count;
        }
      }
    }
  }
  if (s.peak_count > 0) s.peak_mean = peak_sum / static_cast<double>(s.peak_count);
  if (s.stable_count > 0) {
    s.stable_mean = stable_sum / static_cast<double>(s.stable_count);
  }
  return s;
}

double mean_abs_cell_error(const LstmTrace& fp_trace, const LstmTrace& q_trace) {
  check_aligned(fp_trace, q_trace);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t l = 0; l < fp_trace.states.size(); ++l) {
    for (std::size_t t = 0; t < fp_trace.states[l].size(); ++t) {
      const Vector& cf = fp_trace.states[l][t].c;
      const Vector& cq = q_trace.states[l][t].c;
      for (std::size_t k = 0; k < cf.size(); ++k) {
        sum += std::fabs(static_cast<double>(cq[k]) - static_cast<double>(cf[k]));
        ++n;
      }
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace dynlstm
