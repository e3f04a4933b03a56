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

// Runs a model through the FP32 reference and a set of quantized modes, and
// turns the results into a versioned JSON report, per-element trace files
// and parameter sweeps.

#ifndef DYNLSTM_HARNESS_EXPERIMENT_HPP_
#define DYNLSTM_HARNESS_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dynlstm/accel.hpp"
#include "dynlstm/harness/config.hpp"

namespace dynlstm::harness {

inline constexpr const char* kReportSchema = "dynlstm-report";
inline constexpr int kReportVersion = 1;
inline constexpr std::size_t kUsageHistogramBins = 10;

struct ModeResult {
  RunStats stats;
  QuantRun run;
  Comparison vs_static8;
  ErrorStats errors;
  double mean_abs_error = 0.0;
  // Transitions into InPeak, and element-steps spent InPeak, over all layers.
  std::size_t peak_events = 0;
  std::size_t peak_steps = 0;
  // Low-precision evaluations per [layer][element].
  std::vector<std::vector<std::uint64_t>> low_counts;
};

struct Experiment {
  std::uint64_t run_id = 0;
  std::size_t layers = 0;
  std::size_t steps = 0;
  PduConfig pdu;
  HarnessConfig config;
  LstmTrace fp32;
  // Static8 first (it is always run as the baseline), then the requested
  // modes in order, without duplicates.
  std::vector<ModeResult> modes;

  const ModeResult* find(const std::string& mode_name) const;
};

Experiment run_experiment(const LstmModel& model, const InputSequence& seq,
                          const std::vector<Mode>& modes, const HarnessConfig& config);

// Pretty-printed JSON, byte-identical for identical inputs.
std::string report_json(const Experiment& e);

// CSV with header `step,c_fp32,c_quantized,precision,phase`.
void export_trace(const Experiment& e, const ModeResult& m, std::size_t layer,
                  std::size_t element, std::ostream& out);

struct SweepPoint {
  std::string value;
  Experiment experiment;
};

// Re-runs the experiment once per value of `key` (any HarnessConfig key).
std::vector<SweepPoint> sweep(const LstmModel& model, const InputSequence& seq,
                              const std::vector<Mode>& modes, const HarnessConfig& base,
                              const std::string& key, const std::vector<std::string>& values);

std::string sweep_json(const std::string& key, const std::vector<SweepPoint>& points);

}  // namespace dynlstm::harness

#endif  // DYNLSTM_HARNESS_EXPERIMENT_HPP_
