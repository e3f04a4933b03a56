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

// Peak detector unit: one three-phase state machine per cell-state element.
//
//   Profiling --(T samples)--> Stable --(c outside band)--> InPeak
//       ^                        |  ^                         |
//       +----(N steps stable)----+  +----(c back in band)-----+
//       +-----------------(M steps in peak)-------------------+
//
// The band is [min_c - r*beta, max_c + r*beta] with r = max_c - min_c taken
// over the last profiling window (floored at epsilon_range). Elements in the
// InPeak phase are evaluated at 8 bits on the next time step, all others at
// 4 bits.

#ifndef DYNLSTM_PDU_HPP_
#define DYNLSTM_PDU_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dynlstm/quant.hpp"

namespace dynlstm {

enum class Phase : std::uint8_t { Profiling, Stable, InPeak };
const char* to_string(Phase p);

struct PduConfig {
  int t_profile = 16;     // T: profiling window, in time steps
  int m_max_peak = 16;    // M: longest stay in InPeak before re-profiling
  int n_max_stable = 16;  // N: longest stay in Stable before re-profiling
  double beta = 0.1;
  double epsilon_range = 1e-6;
  // Diagnostic: every tracker starts in InPeak and never leaves it.
  bool pin_in_peak = false;

  void validate() const;

  // T = 5% of the sequence length clamped to [4, 64]; M = N = 5% of the
  // sequence length (at least 1). Other fields keep their defaults.
  static PduConfig for_sequence(std::size_t length);
};

struct Thresholds {
  double lower = 0.0;
  double upper = 0.0;
};

Thresholds thresholds(double min_c, double max_c, double beta,
                      double epsilon_range);

struct ElementTracker {
  Phase phase = Phase::Profiling;
  double min_c;
  double max_c;
  double lower = 0.0;
  double upper = 0.0;
  // Profiling: samples folded so far. Stable / InPeak: number of steps the
  // tracker has reported this phase, counting the entry step.
  int steps_in_phase = 0;
  Precision next_precision = Precision::Low4;
  bool pinned = false;

  ElementTracker();
  static ElementTracker initial(const PduConfig& config);
};

// Feeds the cell-state value computed this step; returns the precision to use
// for this element on the next step.
Precision pdu_observe(ElementTracker& tracker, const PduConfig& config,
                      double c_value);

std::vector<Precision> pdu_batch_observe(std::span<ElementTracker> trackers,
                                         const PduConfig& config,
                                         std::span<const float> c_vector);

}  // namespace dynlstm

#endif  // DYNLSTM_PDU_HPP_
