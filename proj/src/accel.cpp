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

#include "dynlstm/accel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "dynlstm/errors.hpp"

namespace dynlstm {

void AccelConfig::validate() const {
  sip.validate();
  if (!(frequency_hz > 0.0) || !(peak_bandwidth > 0.0)) {
    throw InvalidArgument("accel config: frequency and bandwidth must be positive");
  }
  // Latencies may be zero to model an ideal MU.
  if (mu_latency_add < 0 || mu_latency_mul < 0 || mu_latency_exp < 0 ||
      mu_comm < 0) {
    throw InvalidArgument("accel config: MU latencies must be non-negative");
  }
  if (weight_buffer_bytes == 0 || input_buffer_bytes == 0 ||
      intermediate_bytes == 0 || pdu_buffer_bytes == 0 ||
      pdu_bytes_per_element == 0) {
    throw InvalidArgument("accel config: buffer capacities must be positive");
  }
}

std::uint64_t AccelConfig::pipeline_fill() const {
  return static_cast<std::uint64_t>(mu_comm + mu_latency_mul + mu_latency_add +
                                    mu_latency_exp);
}

void EnergyModel::validate() const {
  const double all[] = {weight_byte_read, weight_nibble_read, offset_adjust,
                        input_elem_read,  sip_bit_op,         mu_add,
                        mu_mul,           mu_exp,             pdu_update,
                        static_power};
  for (double v : all) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("energy model: coefficients must be finite and >= 0");
    }
  }
  if (weight_nibble_read > weight_byte_read) {
    throw InvalidArgument("energy model: weight_nibble_read > weight_byte_read");
  }
}

EnergyModel EnergyModel::zero_dynamic(double static_power) {
  EnergyModel e;
  e.weight_byte_read = e.weight_nibble_read = e.offset_adjust = 0.0;
  e.input_elem_read = e.sip_bit_op = 0.0;
  e.mu_add = e.mu_mul = e.mu_exp = e.pdu_update = 0.0;
  e.static_power = static_power;
  return e;
}

double RunStats::energy(const std::string& component) const {
  for (const auto& [name, value] : energy_breakdown) {
    if (name == component) return value;
  }
  throw InvalidArgument("unknown energy component '" + component + "'");
}

void check_capacity(const QuantizedModel& model, std::size_t steps,
                    const AccelConfig& config, bool dynamic) {
  std::uint64_t weights = 0;
  std::uint64_t input_buffer = 0;
  std::uint64_t intermediate = 0;
  std::uint64_t pdu = 0;
  for (const QuantizedLayer& l : model.layers) {
    // Per CU: one gate's forward and recurrent matrices.
    weights += l.cell_size * (l.input_size + l.cell_size);
    // 8-bit x_t and h_{t-1}, plus the FP32 cell state.
    input_buffer = std::max<std::uint64_t>(
        input_buffer, l.input_size + l.cell_size + 4 * l.cell_size);
    // Layers run one after another over the whole sequence; the outputs of
    // the current layer are kept for the next one.
    intermediate = std::max<std::uint64_t>(intermediate, steps * l.cell_size);
    pdu = std::max<std::uint64_t>(pdu, l.cell_size * config.pdu_bytes_per_element);
  }
  // One offset bit per weight.
  weights += (weights + 7) / 8;

  if (weights > config.weight_buffer_bytes) {
    throw CapacityError("weight_buffer", weights, config.weight_buffer_bytes);
  }
  if (input_buffer > config.input_buffer_bytes) {
    throw CapacityError("input_buffer", input_buffer, config.input_buffer_bytes);
  }
  if (intermediate > config.intermediate_bytes) {
    throw CapacityError("intermediate_memory", intermediate,
                        config.intermediate_bytes);
  }
  if (dynamic && pdu > config.pdu_buffer_bytes) {
    throw CapacityError("pdu_buffer", pdu, config.pdu_buffer_bytes);
  }
}

namespace {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ull;
    }
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f32(float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    u64(bits);
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ull;
};

void hash_matrix(Fnv1a& h, const QuantizedMatrix& m) {
  h.u64(m.rows);
  h.u64(m.cols);
  for (const DualIndex& d : m.values.elements) {
    const unsigned char b[2] = {d.packed_byte(),
                                static_cast<unsigned char>(d.offset_bit)};
    h.bytes(b, 2);
  }
}

}  // namespace

std::uint64_t run_fingerprint(const QuantizedModel& model,
                              const InputSequence& seq) {
  Fnv1a h;
  h.u64(model.layers.size());
  for (const QuantizedLayer& l : model.layers) {
    for (const QuantizedGate& g : l.gates) {
      hash_matrix(h, g.w_x);
      hash_matrix(h, g.w_h);
      for (float b : g.b) h.f32(b);
    }
  }
  h.u64(seq.length());
  for (const Vector& v : seq.steps) {
    for (float x : v) h.f32(x);
  }
  return h.value();
}

RunStats account(const QuantizedModel& model, const QuantRun& run,
                 const AccelConfig& config, const EnergyModel& energy,
                 std::uint64_t run_id) {
  config.validate();
  energy.validate();
  if (run.precision.size() != model.layers.size()) {
    throw InvalidArgument("account: run does not match model");
  }

  RunStats s;
  s.mode = run.mode.name();
  s.run_id = run_id;
  const double bytes_per_cycle = config.peak_bandwidth / config.frequency_hz;
  const bool dynamic = run.mode.kind == ModeKind::Dynamic;

  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const QuantizedLayer& layer = model.layers[l];
    const std::size_t fan_in = layer.input_size + layer.cell_size;
    const std::uint64_t low_cost = sip_cycles(fan_in, Precision::Low4, config.sip);
    const std::uint64_t high_cost = sip_cycles(fan_in, Precision::High8, config.sip);
    // One neuron result per cycle into the MU, plus the output-gate CU's
    // element-wise cell update.
    const std::uint64_t mu_issue = 2 * layer.cell_size;
    const std::uint64_t pdu_issue = dynamic ? layer.cell_size : 0;
    // Only the first layer reads its input (FP32) from main memory.
    const std::uint64_t dram_cycles =
        l == 0 ? static_cast<std::uint64_t>(std::ceil(
                     static_cast<double>(4 * layer.input_size) / bytes_per_cycle))
               : 0;

    for (const auto& used : run.precision[l]) {
      std::uint64_t dpu = 0;
      for (Precision p : used) dpu += p == Precision::Low4 ? low_cost : high_cost;
      const std::uint64_t step = std::max({dpu, mu_issue, pdu_issue, dram_cycles});
      s.dpu_cycles += dpu;
      s.stall_cycles += step - dpu;
      s.total_cycles += step;
    }
  }
  s.fill_cycles = config.pipeline_fill();
  s.total_cycles += s.fill_cycles;
  s.wall_time_s = static_cast<double>(s.total_cycles) / config.frequency_hz;

  const StepActivity a = run.total_activity();
  const auto d = [](std::uint64_t n) { return static_cast<double>(n); };
  s.energy_breakdown = {
      {"weight_buffer", d(a.weight_bytes) * energy.weight_byte_read +
                            d(a.weight_nibbles) * energy.weight_nibble_read},
      {"offset_bits",
       d(a.weight_offset_bits + a.input_elems_adjusted) * energy.offset_adjust},
      {"input_buffer", d(a.input_elems_fetched) * energy.input_elem_read},
      {"dpu", d(a.sip_bit_ops) * energy.sip_bit_op},
      {"mu", d(a.mu_add) * energy.mu_add + d(a.mu_mul) * energy.mu_mul +
                 d(a.mu_exp) * energy.mu_exp},
      {"pdu", d(a.pdu_updates) * energy.pdu_update},
      {"static", d(s.total_cycles) * energy.static_power},
  };
  for (const auto& [name, value] : s.energy_breakdown) s.energy_total += value;

  s.elements_low = a.elements_low;
  s.elements_high = a.elements_high;
  s.low_precision_usage = run.low_precision_usage();
  return s;
}

Simulation simulate(const QuantizedModel& model, const InputSequence& seq,
                    const Mode& mode, const AccelConfig& config,
                    const EnergyModel& energy, const PduConfig& pdu_config) {
  config.validate();
  energy.validate();
  check_capacity(model, seq.length(), config, mode.kind == ModeKind::Dynamic);
  Simulation sim;
  sim.run = run_quantized(model, seq, mode, pdu_config);
  sim.stats = account(model, sim.run, config, energy, run_fingerprint(model, seq));
  return sim;
}

Comparison compare(const RunStats& a, const RunStats& b) {
  if (a.run_id != b.run_id) {
    throw InvalidArgument("compare: runs are for different model/sequence pairs");
  }
  if (a.total_cycles == 0 || b.total_cycles == 0) {
    throw InvalidArgument("compare: empty run");
  }
  Comparison c;
  c.speedup = static_cast<double>(b.total_cycles) / static_cast<double>(a.total_cycles);
  c.energy_savings = b.energy_total > 0.0 ? 1.0 - a.energy_total / b.energy_total : 0.0;
  return c;
}

}  // namespace dynlstm
