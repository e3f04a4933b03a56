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

#include "dynlstm/harness/experiment.hpp"

#include <algorithm>
#include <cstdio>

#include "dynlstm/errors.hpp"
#include "json.hpp"

namespace dynlstm::harness {

namespace {

using Json = nlohmann::ordered_json;

void count_peaks(ModeResult& m) {
  m.peak_events = 0;
  m.peak_steps = 0;
  for (const auto& layer : m.run.phase) {
    for (std::size_t t = 0; t < layer.size(); ++t) {
      for (std::size_t k = 0; k < layer[t].size(); ++k) {
        if (layer[t][k] != Phase::InPeak) continue;
        ++m.peak_steps;
        if (t == 0 || layer[t - 1][k] != Phase::InPeak) ++m.peak_events;
      }
    }
  }
}

void count_low(ModeResult& m) {
  m.low_counts.clear();
  for (const auto& layer : m.run.precision) {
    std::vector<std::uint64_t> counts(layer.empty() ? 0 : layer.front().size(), 0);
    for (const auto& step : layer) {
      for (std::size_t k = 0; k < step.size(); ++k) counts[k] += step[k] == Precision::Low4;
    }
    m.low_counts.push_back(std::move(counts));
  }
}

Json stats_json(const RunStats& s) {
  Json energy = Json::object();
  for (const auto& [name, value] : s.energy_breakdown) energy[name] = value;
  return Json{{"total_cycles", s.total_cycles},
              {"dpu_cycles", s.dpu_cycles},
              {"stall_cycles", s.stall_cycles},
              {"fill_cycles", s.fill_cycles},
              {"wall_time_s", s.wall_time_s},
              {"energy_total", s.energy_total},
              {"energy_breakdown", energy},
              {"low_precision_usage", s.low_precision_usage},
              {"elements_low", s.elements_low},
              {"elements_high", s.elements_high}};
}

Json mode_json(const Experiment& e, const ModeResult& m) {
  Json j;
  j["mode"] = m.stats.mode;
  if (m.run.mode.kind == ModeKind::Random) {
    j["low_probability"] = m.run.mode.low_probability;
    j["seed"] = m.run.mode.seed;
  }
  j["stats"] = stats_json(m.stats);
  j["vs_static8"] = {{"speedup", m.vs_static8.speedup},
                     {"energy_savings", m.vs_static8.energy_savings}};
  j["error"] = {{"peak_mean_relative", m.errors.peak_mean},
                {"stable_mean_relative", m.errors.stable_mean},
                {"peak_count", m.errors.peak_count},
                {"stable_count", m.errors.stable_count},
                {"mean_abs", m.mean_abs_error}};
  j["peak_events"] = m.peak_events;
  j["peak_steps"] = m.peak_steps;

  Json layers = Json::array();
  for (const auto& counts : m.low_counts) {
    std::vector<std::uint64_t> hist(kUsageHistogramBins, 0);
    for (std::uint64_t c : counts) {
      const double frac = e.steps == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(e.steps);
      const auto bin = std::min<std::size_t>(
          kUsageHistogramBins - 1, static_cast<std::size_t>(frac * kUsageHistogramBins));
      ++hist[bin];
    }
    layers.push_back({{"low_counts", counts}, {"usage_histogram", hist}});
  }
  j["precision"] = {{"steps", e.steps}, {"layers", layers}};
  return j;
}

Json pdu_json(const PduConfig& p) {
  return Json{{"t_profile", p.t_profile},       {"m_max_peak", p.m_max_peak},
              {"n_max_stable", p.n_max_stable}, {"beta", p.beta},
              {"epsilon_range", p.epsilon_range}};
}

Json experiment_json(const Experiment& e) {
  char id[17];
  std::snprintf(id, sizeof id, "%016llx", static_cast<unsigned long long>(e.run_id));
  Json modes = Json::array();
  for (const ModeResult& m : e.modes) modes.push_back(mode_json(e, m));
  return Json{{"run_id", id},
              {"layers", e.layers},
              {"steps", e.steps},
              {"pdu", pdu_json(e.pdu)},
              {"modes", modes}};
}

}  // namespace

const ModeResult* Experiment::find(const std::string& mode_name) const {
  for (const ModeResult& m : modes) {
    if (m.stats.mode == mode_name) return &m;
  }
  return nullptr;
}

Experiment run_experiment(const LstmModel& model, const InputSequence& seq,
                          const std::vector<Mode>& modes, const HarnessConfig& config) {
  config.validate();
  model.validate();
  seq.validate();
  if (seq.width() != model.input_size()) {
    throw InvalidArgument("sequence width " + std::to_string(seq.width()) +
                          " does not match model input size " +
                          std::to_string(model.input_size()));
  }

  Experiment e;
  e.config = config;
  e.layers = model.layers.size();
  e.steps = seq.length();
  e.pdu = config.pdu_for(seq.length());
  e.fp32 = run_fp32(model, seq);
  const QuantizedModel q = quantize_model(model);

  std::vector<Mode> plan{Mode::static8()};
  for (const Mode& m : modes) {
    const bool seen = std::any_of(plan.begin(), plan.end(),
                                  [&](const Mode& p) { return p.name() == m.name(); });
    if (!seen) plan.push_back(m);
  }

  for (const Mode& mode : plan) {
    Simulation sim = simulate(q, seq, mode, config.accel, config.energy, e.pdu);
    ModeResult r;
    r.stats = std::move(sim.stats);
    r.run = std::move(sim.run);
    r.errors = relative_error_stats(e.fp32, r.run.trace, r.run.phase, config.eps_denom);
    r.mean_abs_error = mean_abs_cell_error(e.fp32, r.run.trace);
    count_peaks(r);
    count_low(r);
    e.modes.push_back(std::move(r));
  }
  e.run_id = e.modes.front().stats.run_id;
  for (ModeResult& r : e.modes) r.vs_static8 = compare(r.stats, e.modes.front().stats);
  return e;
}

std::string report_json(const Experiment& e) {
  Json j{{"schema", kReportSchema}, {"version", kReportVersion}};
  j.update(experiment_json(e));
  j["config"] = e.config.to_text();
  return j.dump(2) + "\n";
}

void export_trace(const Experiment& e, const ModeResult& m, std::size_t layer,
                  std::size_t element, std::ostream& out) {
  if (layer >= e.layers) {
    throw InvalidArgument("layer " + std::to_string(layer) + " out of range (model has " +
                          std::to_string(e.layers) + ")");
  }
  const std::size_t cells = e.fp32.states[layer].front().c.size();
  if (element >= cells) {
    throw InvalidArgument("element " + std::to_string(element) + " out of range (layer has " +
                          std::to_string(cells) + " cells)");
  }
  out << "step,c_fp32,c_quantized,precision,phase\n";
  char buf[64];
  for (std::size_t t = 0; t < e.steps; ++t) {
    out << t;
    std::snprintf(buf, sizeof buf, ",%.9g,%.9g,", e.fp32.states[layer][t].c[element],
                  m.run.trace.states[layer][t].c[element]);
    out << buf << to_string(m.run.precision[layer][t][element]) << ','
        << to_string(m.run.phase[layer][t][element]) << '\n';
  }
}

std::vector<SweepPoint> sweep(const LstmModel& model, const InputSequence& seq,
                              const std::vector<Mode>& modes, const HarnessConfig& base,
                              const std::string& key, const std::vector<std::string>& values) {
  if (values.empty()) throw InvalidArgument("sweep needs at least one value");
  std::vector<SweepPoint> points;
  for (const std::string& v : values) {
    HarnessConfig c = base;
    c.set(key, v);
    points.push_back({v, run_experiment(model, seq, modes, c)});
  }
  return points;
}

std::string sweep_json(const std::string& key, const std::vector<SweepPoint>& points) {
  Json j{{"schema", kReportSchema}, {"version", kReportVersion}, {"sweep", key}};
  Json arr = Json::array();
  for (const SweepPoint& p : points) {
    Json point{{"value", p.value}};
    point.update(experiment_json(p.experiment));
    arr.push_back(std::move(point));
  }
  j["points"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace dynlstm::harness
