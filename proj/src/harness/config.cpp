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

#include "dynlstm/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "dynlstm/errors.hpp"

namespace dynlstm::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw InvalidArgument(key + ": expected a number, got '" + v + "'");
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InvalidArgument(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

std::string fmt_double(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

struct Field {
  std::function<void(HarnessConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const HarnessConfig&)> get;
};

Field double_field(double HarnessConfig::*member) {
  return {[member](HarnessConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_double(k, v);
          },
          [member](const HarnessConfig& c) { return fmt_double(c.*member); }};
}

Field auto_field(std::optional<int> HarnessConfig::*member) {
  return {[member](HarnessConfig& c, const std::string& k, const std::string& v) {
            if (v == "auto") {
              (c.*member).reset();
            } else {
              c.*member = static_cast<int>(parse_int(k, v));
            }
          },
          [member](const HarnessConfig& c) {
            return (c.*member) ? std::to_string(*(c.*member)) : std::string("auto");
          }};
}

#define DYNLSTM_ACCEL_INT(name)                                                 \
  Field{[](HarnessConfig& c, const std::string& k, const std::string& v) {     \
          c.accel.name = static_cast<decltype(c.accel.name)>(parse_int(k, v)); \
        },                                                                      \
        [](const HarnessConfig& c) { return std::to_string(c.accel.name); }}
#define DYNLSTM_ACCEL_DOUBLE(name)                                          \
  Field{[](HarnessConfig& c, const std::string& k, const std::string& v) { \
          c.accel.name = parse_double(k, v);                                \
        },                                                                  \
        [](const HarnessConfig& c) { return fmt_double(c.accel.name); }}
#define DYNLSTM_SIP_INT(name)                                               \
  Field{[](HarnessConfig& c, const std::string& k, const std::string& v) { \
          c.accel.sip.name = static_cast<int>(parse_int(k, v));             \
        },                                                                  \
        [](const HarnessConfig& c) { return std::to_string(c.accel.sip.name); }}
#define DYNLSTM_ENERGY(name)                                                \
  Field{[](HarnessConfig& c, const std::string& k, const std::string& v) { \
          c.energy.name = parse_double(k, v);                               \
        },                                                                  \
        [](const HarnessConfig& c) { return fmt_double(c.energy.name); }}

const std::vector<std::pair<std::string, Field>>& field_table() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"t_profile", auto_field(&HarnessConfig::t_profile)},
      {"m_max_peak", auto_field(&HarnessConfig::m_max_peak)},
      {"n_max_stable", auto_field(&HarnessConfig::n_max_stable)},
      {"beta", double_field(&HarnessConfig::beta)},
      {"epsilon_range", double_field(&HarnessConfig::epsilon_range)},
      {"lanes", DYNLSTM_SIP_INT(lanes)},
      {"lane_width", DYNLSTM_SIP_INT(lane_width)},
      {"reduction_latency", DYNLSTM_SIP_INT(reduction_latency)},
      {"frequency_hz", DYNLSTM_ACCEL_DOUBLE(frequency_hz)},
      {"mu_latency_add", DYNLSTM_ACCEL_INT(mu_latency_add)},
      {"mu_latency_mul", DYNLSTM_ACCEL_INT(mu_latency_mul)},
      {"mu_latency_exp", DYNLSTM_ACCEL_INT(mu_latency_exp)},
      {"mu_comm", DYNLSTM_ACCEL_INT(mu_comm)},
      {"weight_buffer_bytes", DYNLSTM_ACCEL_INT(weight_buffer_bytes)},
      {"input_buffer_bytes", DYNLSTM_ACCEL_INT(input_buffer_bytes)},
      {"intermediate_bytes", DYNLSTM_ACCEL_INT(intermediate_bytes)},
      {"pdu_buffer_bytes", DYNLSTM_ACCEL_INT(pdu_buffer_bytes)},
      {"pdu_bytes_per_element", DYNLSTM_ACCEL_INT(pdu_bytes_per_element)},
      {"peak_bandwidth", DYNLSTM_ACCEL_DOUBLE(peak_bandwidth)},
      {"energy.weight_byte_read", DYNLSTM_ENERGY(weight_byte_read)},
      {"energy.weight_nibble_read", DYNLSTM_ENERGY(weight_nibble_read)},
      {"energy.offset_adjust", DYNLSTM_ENERGY(offset_adjust)},
      {"energy.input_elem_read", DYNLSTM_ENERGY(input_elem_read)},
      {"energy.sip_bit_op", DYNLSTM_ENERGY(sip_bit_op)},
      {"energy.mu_add", DYNLSTM_ENERGY(mu_add)},
      {"energy.mu_mul", DYNLSTM_ENERGY(mu_mul)},
      {"energy.mu_exp", DYNLSTM_ENERGY(mu_exp)},
      {"energy.pdu_update", DYNLSTM_ENERGY(pdu_update)},
      {"energy.static_power", DYNLSTM_ENERGY(static_power)},
      {"random_p", double_field(&HarnessConfig::random_p)},
      {"eps_denom", double_field(&HarnessConfig::eps_denom)},
  };
  return table;
}

#undef DYNLSTM_ACCEL_INT
#undef DYNLSTM_ACCEL_DOUBLE
#undef DYNLSTM_SIP_INT
#undef DYNLSTM_ENERGY

const Field& field(const std::string& key) {
  for (const auto& [name, f] : field_table()) {
    if (name == key) return f;
  }
  throw InvalidArgument("unknown config key '" + key + "'");
}

}  // namespace

PduConfig HarnessConfig::pdu_for(std::size_t length) const {
  PduConfig p = PduConfig::for_sequence(length);
  if (t_profile) p.t_profile = *t_profile;
  if (m_max_peak) p.m_max_peak = *m_max_peak;
  if (n_max_stable) p.n_max_stable = *n_max_stable;
  p.beta = beta;
  p.epsilon_range = epsilon_range;
  return p;
}

void HarnessConfig::validate() const {
  pdu_for(1).validate();
  accel.validate();
  energy.validate();
  if (!(random_p >= 0.0 && random_p <= 1.0)) {
    throw InvalidArgument("random_p must be in [0, 1]");
  }
  if (!(eps_denom > 0.0)) throw InvalidArgument("eps_denom must be positive");
}

void HarnessConfig::set(const std::string& key, const std::string& value) {
  field(key).set(*this, key, value);
}

std::string HarnessConfig::get(const std::string& key) const {
  return field(key).get(*this);
}

const std::vector<std::string>& HarnessConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, f] : field_table()) v.push_back(name);
    return v;
  }();
  return names;
}

std::string HarnessConfig::to_text() const {
  std::ostringstream out;
  for (const auto& [name, f] : field_table()) {
    out << name << " = " << f.get(*this) << "\n";
  }
  return out.str();
}

HarnessConfig parse_config(const std::string& text) {
  HarnessConfig config;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line = text.substr(pos, end - pos);
    line = trim(line.substr(0, line.find('#')));
    const auto line_offset = static_cast<std::int64_t>(pos);
    pos = end + 1;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(ParseErrorKind::Syntax,
                       "config: expected 'key = value', got '" + line + "'",
                       line_offset);
    }
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const InvalidArgument& e) {
      throw ParseError(ParseErrorKind::Syntax, std::string("config: ") + e.what(),
                       line_offset);
    }
  }
  try {
    config.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(ParseErrorKind::Syntax, std::string("config: ") + e.what());
  }
  return config;
}

HarnessConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseErrorKind::Io, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace dynlstm::harness
