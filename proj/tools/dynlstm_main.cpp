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

// dynlstm: generate toy models, run them through the accelerator model and
// write reports, traces and sweeps.
//
// Exit codes: 0 ok, 1 usage, 2 input format, 3 capacity.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dynlstm/errors.hpp"
#include "dynlstm/harness/config.hpp"
#include "dynlstm/harness/experiment.hpp"
#include "dynlstm/harness/model_io.hpp"
#include "dynlstm/harness/toy.hpp"

namespace {

using namespace dynlstm;
using namespace dynlstm::harness;

enum ExitCode { kOk = 0, kUsage = 1, kFormat = 2, kCapacity = 3 };

struct Inputs {
  std::string model;
  std::string input;
  std::string config;
  std::vector<std::string> modes{"dynamic"};
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--model", model, "model manifest")->required();
    cmd->add_option("--input", input, "input sequence file")->required();
    cmd->add_option("--config", config, "key = value config file");
    cmd->add_option("--mode", modes, "static8, static4, dynamic or random (repeatable)")
        ->delimiter(',');
    cmd->add_option("--seed", seed, "seed for random mode");
  }
};

struct Loaded {
  LstmModel model;
  InputSequence seq;
  HarnessConfig config;
  std::vector<Mode> modes;
};

Loaded load(const Inputs& in) {
  Loaded l;
  l.config = in.config.empty() ? HarnessConfig{} : load_config(in.config);
  l.model = load_model(in.model);
  l.seq = load_sequence(in.input);
  for (const std::string& name : in.modes) {
    Mode m = Mode::parse(name, in.seed);
    m.low_probability = l.config.random_p;
    l.modes.push_back(m);
  }
  return l;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(ParseErrorKind::Io, "cannot write '" + path + "'");
  out << text;
}

int cmd_gen(const std::string& kind, const std::string& dims, std::uint64_t seed,
            const std::string& out_dir) {
  const Toy toy = gen_toy(parse_toy_kind(kind), ToyDims::parse(dims), seed);
  std::filesystem::create_directories(out_dir);
  const std::string model_path = (std::filesystem::path(out_dir) / "model.txt").string();
  const std::string seq_path = (std::filesystem::path(out_dir) / "input.seq").string();
  write_model(toy.model, model_path);
  write_sequence(toy.seq, seq_path);
  std::cout << "model " << model_path << "\ninput " << seq_path << "\n";
  if (!toy.spike_steps.empty()) {
    std::cout << "spikes element " << toy.driven_element << " at";
    for (std::size_t t : toy.spike_steps) std::cout << ' ' << t;
    std::cout << "\n";
  }
  return kOk;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"LSTM accelerator model with dynamic 8/4-bit precision"};
  app.require_subcommand(1);

  std::string kind, dims = "1x8x8x200", out_dir;
  std::uint64_t gen_seed = 1;
  CLI::App* gen = app.add_subcommand("gen", "generate a toy model and input sequence");
  gen->add_option("--kind", kind, "flat, peaky or random")->required();
  gen->add_option("--dims", dims, "LAYERSxCELLxINPUTxSTEPS");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", out_dir, "output directory")->required();

  Inputs run_in;
  std::string report;
  CLI::App* run = app.add_subcommand("run", "simulate modes and write a JSON report");
  run_in.add_to(run);
  run->add_option("--report", report, "report path (default stdout)");

  Inputs trace_in;
  std::size_t element = 0, layer = 0;
  std::string trace_out;
  CLI::App* trace = app.add_subcommand("trace", "write one element's cell-state trace as CSV");
  trace_in.add_to(trace);
  trace->add_option("--element", element, "cell element index")->required();
  trace->add_option("--layer", layer, "layer index");
  trace->add_option("--out", trace_out, "CSV path (default stdout)");

  Inputs sweep_in;
  std::string param;
  std::vector<std::string> values;
  std::string sweep_report;
  CLI::App* sw = app.add_subcommand("sweep", "re-run with one config key set to each value");
  sweep_in.add_to(sw);
  sw->add_option("--param", param, "config key")->required();
  sw->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  sw->add_option("--report", sweep_report, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  if (gen->parsed()) return cmd_gen(kind, dims, gen_seed, out_dir);
  if (run->parsed()) {
    const Loaded l = load(run_in);
    write_text(report, report_json(run_experiment(l.model, l.seq, l.modes, l.config)));
    return kOk;
  }
  if (trace->parsed()) {
    Loaded l = load(trace_in);
    if (l.modes.size() != 1) throw InvalidArgument("trace takes exactly one --mode");
    const Experiment e = run_experiment(l.model, l.seq, l.modes, l.config);
    std::ostringstream csv;
    export_trace(e, *e.find(l.modes.front().name()), layer, element, csv);
    write_text(trace_out, csv.str());
    return kOk;
  }
  const Loaded l = load(sweep_in);
  write_text(sweep_report,
             sweep_json(param, sweep(l.model, l.seq, l.modes, l.config, param, values)));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const dynlstm::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kCapacity;
  } catch (const dynlstm::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kFormat;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
