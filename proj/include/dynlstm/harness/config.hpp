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

// Flat `key = value` configuration covering the PDU, SIP, accelerator and
// energy parameters. '#' starts a comment that runs to the end of the line.
// PDU window sizes left unset (or set to `auto`) are derived from the
// sequence length.

#ifndef DYNLSTM_HARNESS_CONFIG_HPP_
#define DYNLSTM_HARNESS_CONFIG_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dynlstm/accel.hpp"
#include "dynlstm/pdu.hpp"

namespace dynlstm::harness {

struct HarnessConfig {
  std::optional<int> t_profile;
  std::optional<int> m_max_peak;
  std::optional<int> n_max_stable;
  double beta = 0.1;
  double epsilon_range = 1e-6;

  AccelConfig accel;
  EnergyModel energy;

  double random_p = 0.33;
  double eps_denom = 1e-3;

  // PduConfig::for_sequence(length) with any explicit settings applied.
  PduConfig pdu_for(std::size_t length) const;
  void validate() const;

  // Sets one key; throws InvalidArgument for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  // Reads the value of a key back in config-file syntax.
  std::string get(const std::string& key) const;
  // Every recognized key, in documentation order.
  static const std::vector<std::string>& keys();
  // The full configuration in config-file syntax.
  std::string to_text() const;
};

HarnessConfig parse_config(const std::string& text);
HarnessConfig load_config(const std::string& path);

}  // namespace dynlstm::harness

#endif  // DYNLSTM_HARNESS_CONFIG_HPP_
