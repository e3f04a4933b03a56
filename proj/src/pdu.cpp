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

#include "dynlstm/pdu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dynlstm/errors.hpp"

namespace dynlstm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void enter(ElementTracker& t, Phase phase) {
  t.phase = phase;
  if (phase == Phase::Profiling) {
    t.min_c = kInf;
    t.max_c = -kInf;
    t.steps_in_phase = 0;
  } else {
    t.steps_in_phase = 1;
  }
}

bool in_band(const ElementTracker& t, double c) {
  return t.lower <= c && c <= t.upper;
}

}  // namespace

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Profiling: return "profiling";
    case Phase::Stable: return "stable";
    case Phase::InPeak: return "in_peak";
  }
  return "?";
}

void PduConfig::validate() const {
  if (t_profile < 1 || m_max_peak < 1 || n_max_stable < 1) {
    throw InvalidArgument(
        "pdu config: t_profile, m_max_peak and n_max_stable must be >= 1");
  }
  if (std::isnan(beta) || beta < 0.0) {
    throw InvalidArgument("pdu config: beta must be non-negative");
  }
  if (!(epsilon_range > 0.0) || !std::isfinite(epsilon_range)) {
    throw InvalidArgument("pdu config: epsilon_range must be positive");
  }
}

PduConfig PduConfig::for_sequence(std::size_t length) {
  PduConfig config;
  const int five_pct =
      std::max(1, static_cast<int>(std::ceil(0.05 * static_cast<double>(length))));
  config.t_profile = std::clamp(five_pct, 4, 64);
  config.m_max_peak = five_pct;
  config.n_max_stable = five_pct;
  return config;
}

Thresholds thresholds(double min_c, double max_c, double beta,
                      double epsilon_range) {
  if (max_c < min_c) {
    throw InvalidArgument("thresholds: max_c < min_c");
  }
  const double r = std::max(max_c - min_c, epsilon_range);
  return Thresholds{min_c - r * beta, max_c + r * beta};
}

ElementTracker::ElementTracker() : min_c(kInf), max_c(-kInf) {}

ElementTracker ElementTracker::initial(const PduConfig& config) {
  ElementTracker t;
  if (config.pin_in_peak) {
    t.pinned = true;
    t.phase = Phase::InPeak;
    t.steps_in_phase = 1;
    t.next_precision = Precision::High8;
  }
  return t;
}

Precision pdu_observe(ElementTracker& t, const PduConfig& config,
                      double c_value) {
  if (!std::isfinite(c_value)) {
    throw InvalidArgument("pdu_observe: cell-state value is not finite");
  }
  if (t.pinned) return t.next_precision;

  switch (t.phase) {
    case Phase::Profiling:
      t.min_c = std::min(t.min_c, c_value);
      t.max_c = std::max(t.max_c, c_value);
      if (++t.steps_in_phase >= config.t_profile) {
        const Thresholds th =
            thresholds(t.min_c, t.max_c, config.beta, config.epsilon_range);
        t.lower = th.lower;
        t.upper = th.upper;
        enter(t, Phase::Stable);
      }
      break;
    case Phase::Stable:
      if (!in_band(t, c_value)) {
        enter(t, Phase::InPeak);
      } else if (t.steps_in_phase >= config.n_max_stable) {
        enter(t, Phase::Profiling);
      } else {
        ++t.steps_in_phase;
      }
      break;
    case Phase::InPeak:
      if (in_band(t, c_value)) {
        enter(t, Phase::Stable);
      } else if (t.steps_in_phase >= config.m_max_peak) {
        enter(t, Phase::Profiling);
      } else {
        ++t.steps_in_phase;
      }
      break;
  }
  t.next_precision =
      t.phase == Phase::InPeak ? Precision::High8 : Precision::Low4;
  return t.next_precision;
}

std::vector<Precision> pdu_batch_observe(std::span<ElementTracker> trackers,
                                         const PduConfig& config,
                                         std::span<const float> c_vector) {
  if (trackers.size() != c_vector.size()) {
    throw InvalidArgument("pdu_batch_observe: " +
                          std::to_string(trackers.size()) + " trackers for " +
                          std::to_string(c_vector.size()) + " values");
  }
  std::vector<Precision> out(trackers.size());
  for (std::size_t k = 0; k < trackers.size(); ++k) {
    out[k] = pdu_observe(trackers[k], config, c_vector[k]);
  }
  return out;
}

}  // namespace dynlstm
