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

// Analytical timing and energy model of the accelerator.
//
// Four compute units (one per gate) work in parallel; each evaluates its
// gate's neurons one after another on a dot-product unit built from SIPs. The
// multi-functional unit (MU) and the peak detector (PDU) are pipelined behind
// the DPU, so a layer step costs
//
//   max(DPU cycles, MU issue cycles, PDU issue cycles, DRAM transfer cycles)
//
// and the MU pipeline latency is paid once as fill at the start of the run.
// Energy is activity times per-event coefficients plus static power times
// cycles.

#ifndef DYNLSTM_ACCEL_HPP_
#define DYNLSTM_ACCEL_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dynlstm/lstm_quant.hpp"
#include "dynlstm/sip_model.hpp"

namespace dynlstm {

struct AccelConfig {
  double frequency_hz = 500e6;
  SipConfig sip;
  // MU operation latencies and DPU->MU transfer, in cycles.
  int mu_latency_add = 2;
  int mu_latency_mul = 4;
  int mu_latency_exp = 5;
  int mu_comm = 2;
  std::uint64_t weight_buffer_bytes = 2u << 20;  // per CU
  std::uint64_t input_buffer_bytes = 8u << 10;   // per CU
  std::uint64_t intermediate_bytes = 6u << 20;
  std::uint64_t pdu_buffer_bytes = 8u << 10;
  std::uint64_t pdu_bytes_per_element = 8;
  double peak_bandwidth = 30e9;  // bytes/s

  void validate() const;
  // One neuron's trip through the MU: transfer, rescale, add, activation.
  std::uint64_t pipeline_fill() const;
};

// Per-event energy in normalized units. The defaults are a relative profile,
// not measured silicon numbers.
struct EnergyModel {
  double weight_byte_read = 1.0;
  double weight_nibble_read = 0.5;
  double offset_adjust = 0.125;
  double input_elem_read = 1.0;
  double sip_bit_op = 0.05;
  double mu_add = 0.4;
  double mu_mul = 1.0;
  double mu_exp = 2.0;
  double pdu_update = 0.5;
  double static_power = 8.0;  // per cycle, whole accelerator

  void validate() const;
  static EnergyModel zero_dynamic(double static_power);
};

// Energy components, in the fixed order they are summed.
inline constexpr const char* kEnergyComponents[] = {
    "weight_buffer", "offset_bits", "input_buffer", "dpu", "mu", "pdu", "static"};

struct RunStats {
  std::string mode;
  std::uint64_t run_id = 0;  // fingerprint of (model, sequence)
  std::uint64_t total_cycles = 0;
  std::uint64_t dpu_cycles = 0;
  std::uint64_t stall_cycles = 0;  // cycles where a non-DPU bound dominated
  std::uint64_t fill_cycles = 0;
  double wall_time_s = 0.0;
  std::vector<std::pair<std::string, double>> energy_breakdown;
  double energy_total = 0.0;
  double low_precision_usage = 0.0;
  std::uint64_t elements_low = 0;
  std::uint64_t elements_high = 0;

  double energy(const std::string& component) const;
};

struct Comparison {
  double speedup = 1.0;         // cycles_b / cycles_a
  double energy_savings = 0.0;  // 1 - energy_a / energy_b
};

// Throws CapacityError naming the first buffer the model or sequence does
// not fit. The PDU buffer is only checked when `dynamic` is set.
void check_capacity(const QuantizedModel& model, std::size_t steps,
                    const AccelConfig& config, bool dynamic);

// FNV-1a over the quantized model and the raw sequence.
std::uint64_t run_fingerprint(const QuantizedModel& model,
                              const InputSequence& seq);

// Timing/energy for a run that has already been evaluated.
RunStats account(const QuantizedModel& model, const QuantRun& run,
                 const AccelConfig& config, const EnergyModel& energy,
                 std::uint64_t run_id);

struct Simulation {
  RunStats stats;
  QuantRun run;
};

Simulation simulate(const QuantizedModel& model, const InputSequence& seq,
                    const Mode& mode, const AccelConfig& config,
                    const EnergyModel& energy, const PduConfig& pdu_config);

// Speedup and energy savings of run a relative to baseline b.
Comparison compare(const RunStats& a, const RunStats& b);

}  // namespace dynlstm

#endif  // DYNLSTM_ACCEL_HPP_
