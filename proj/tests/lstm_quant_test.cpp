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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dynlstm/errors.hpp"
#include "oracles.hpp"

namespace dynlstm {
namespace {

long double max_abs(std::span<const float> v) {
  long double m = 0;
  for (float x : v) m = std::max(m, std::fabs(static_cast<long double>(x)));
  return m == 0 ? 1.0L : m;
}

// Quantize, dequantize and form the gate pre-activations in long double.
std::array<long double, 4> dequantized_preactivations(const LstmLayer& L, std::size_t k,
                                                      int bits, const Vector& x,
                                                      const Vector& h) {
  auto deq = [&](float v, long double alpha) {
    return oracle::quantize(v, alpha, bits) * (alpha / std::ldexp(1.0L, bits - 1));
  };
  const long double ax = max_abs(x);
  std::array<long double, 4> out{};
  for (std::size_t g = 0; g < 4; ++g) {
    const GateWeights& w = L.gates[g];
    const long double awx = max_abs(w.w_x.data()), awh = max_abs(w.w_h.data());
    long double s = w.b[k];
    for (std::size_t j = 0; j < x.size(); ++j) s += deq(w.w_x(k, j), awx) * deq(x[j], ax);
    for (std::size_t j = 0; j < h.size(); ++j) s += deq(w.w_h(k, j), awh) * deq(h[j], 1.0L);
    out[g] = s;
  }
  return out;
}

TEST(QuantizeModel, Alphas) {
  LstmModel m;
  m.layers.push_back(LstmLayer::zeros(2, 3));
  m.layers[0].gate(Gate::Forget).w_x(1, 2) = 1.0f;
  m.layers[0].gate(Gate::Forget).w_x(0, 0) = -0.3f;
  const QuantizedModel q = quantize_model(m);
  const QuantizedMatrix& f = q.layers[0].gate(Gate::Forget).w_x;
  EXPECT_EQ(f.params(Precision::High8).alpha, 1.0);
  EXPECT_EQ(f.high[5], 127);
  const QuantizedMatrix& zero = q.layers[0].gate(Gate::Input).w_h;
  EXPECT_EQ(zero.params(Precision::Low4).alpha, 1.0);
  for (std::int8_t v : zero.high) EXPECT_EQ(v, 0);
  EXPECT_EQ(q.total_elements(), 2u);
}

TEST(QuantizeModel, RoundTripWithinHalfStep) {
  const LstmModel m = oracle::random_model(2, 6, 5, 31);
  const QuantizedModel q = quantize_model(m);
  for (std::size_t l = 0; l < 2; ++l) {
    for (Gate g : kGates) {
      const Matrix& w = m.layers[l].gate(g).w_x;
      const QuantizedMatrix& qw = q.layers[l].gate(g).w_x;
      for (Precision p : {Precision::Low4, Precision::High8}) {
        const double step = qw.params(p).step;
        const double alpha = qw.params(p).alpha;
        for (std::size_t i = 0; i < w.data().size(); ++i) {
          const auto& v = p == Precision::Low4 ? qw.low : qw.high;
          const double y = w.data()[i];
          if (std::abs(y) <= alpha * (1 - std::ldexp(1.0, 1 - bits_of(p)))) {
            EXPECT_LE(std::abs(v[i] * step - y), step / 2 + 1e-12);
          }
        }
      }
    }
  }
}

TEST(NeuronEval, ZeroWeightsGiveBiases) {
  LstmLayer L = LstmLayer::zeros(3, 2);
  for (std::size_t g = 0; g < 4; ++g) L.gates[g].b = {0.1f * g, -0.2f, 0.7f};
  LstmModel m;
  m.layers.push_back(L);
  const QuantizedModel q = quantize_model(m);
  const QuantizedInputs in = QuantizedInputs::encode(Vector{0.3f, -0.9f}, Vector{0.5f, 0, -0.2f});
  for (Precision p : {Precision::Low4, Precision::High8}) {
    const auto pre = neuron_eval(q.layers[0], 2, p, in);
    for (double v : pre) EXPECT_EQ(v, static_cast<double>(0.7f));
  }
  EXPECT_THROW(neuron_eval(q.layers[0], 3, Precision::Low4, in), InvalidArgument);
}

TEST(NeuronEval, MatchesDequantizedOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t cells = 1 + seed % 5, inputs = 1 + seed % 7;
    const LstmModel m = oracle::random_model(1, cells, inputs, 40 + seed);
    const QuantizedModel q = quantize_model(m);
    const Vector x = oracle::random_sequence(1, inputs, 70 + seed, 2.0f).steps[0];
    const Vector h = oracle::random_sequence(1, cells, 90 + seed, 0.99f).steps[0];
    const QuantizedInputs in = QuantizedInputs::encode(x, h);
    for (std::size_t k = 0; k < cells; ++k) {
      for (Precision p : {Precision::Low4, Precision::High8}) {
        const auto got = neuron_eval(q.layers[0], k, p, in);
        const auto want = dequantized_preactivations(m.layers[0], k, bits_of(p), x, h);
        for (std::size_t g = 0; g < 4; ++g) {
          EXPECT_NEAR(got[g], static_cast<double>(want[g]), 1e-6) << seed << " " << k;
        }
      }
    }
  }
}

TEST(NeuronEval, ActivityPerElement) {
  const LstmModel m = oracle::random_model(1, 3, 5, 1);
  const QuantizedModel q = quantize_model(m);
  const QuantizedInputs in = QuantizedInputs::encode(Vector(5, 0.5f), Vector(3, 0.1f));
  StepActivity a;
  neuron_eval(q.layers[0], 0, Precision::Low4, in, &a);
  neuron_eval(q.layers[0], 1, Precision::High8, in, &a);
  EXPECT_EQ(a.weight_nibbles, 32u);
  EXPECT_EQ(a.weight_offset_bits, 32u);
  EXPECT_EQ(a.weight_bytes, 32u);
  EXPECT_EQ(a.sip_bit_ops, 32u * 4 + 32u * 8);
  EXPECT_EQ(a.elements_low, 1u);
  EXPECT_EQ(a.elements_high, 1u);
}

class RunQuantized : public ::testing::Test {
 protected:
  LstmModel model = oracle::random_model(2, 8, 8, 5);
  QuantizedModel q = quantize_model(model);
  InputSequence seq = oracle::random_sequence(120, 8, 6);
  PduConfig pdu = PduConfig::for_sequence(120);
};

TEST_F(RunQuantized, Static8TracksFp32BetterThanStatic4) {
  const LstmTrace fp = run_fp32(model, seq);
  const double e8 = mean_abs_cell_error(fp, run_quantized(q, seq, Mode::static8(), pdu).trace);
  const double e4 = mean_abs_cell_error(fp, run_quantized(q, seq, Mode::static4(), pdu).trace);
  EXPECT_LT(e8, 0.02);
  EXPECT_LT(e8, e4);
}

TEST_F(RunQuantized, ConstantInputIsMostlyLowPrecision) {
  InputSequence flat;
  flat.steps.assign(200, seq.steps[0]);
  const QuantRun r = run_quantized(q, flat, Mode::dynamic(), PduConfig::for_sequence(200));
  EXPECT_GE(r.low_precision_usage(), 0.95);
}

TEST_F(RunQuantized, RandomModeUsageAndDeterminism) {
  const InputSequence long_seq = oracle::random_sequence(700, 8, 8);
  const QuantRun a = run_quantized(q, long_seq, Mode::random(0.33, 42), pdu);
  const StepActivity t = a.total_activity();
  EXPECT_GE(t.elements_low + t.elements_high, 10000u);
  EXPECT_NEAR(a.low_precision_usage(), 0.33, 0.02);
  const QuantRun b = run_quantized(q, long_seq, Mode::random(0.33, 42), pdu);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.precision, b.precision);
  const QuantRun c = run_quantized(q, long_seq, Mode::random(0.33, 43), pdu);
  EXPECT_NE(a.precision, c.precision);
}

TEST_F(RunQuantized, ModeEquivalence) {
  PduConfig wide = pdu;
  wide.beta = std::numeric_limits<double>::infinity();
  const QuantRun s4 = run_quantized(q, seq, Mode::static4(), pdu);
  const QuantRun dw = run_quantized(q, seq, Mode::dynamic(), wide);
  EXPECT_EQ(dw.trace, s4.trace);
  EXPECT_EQ(dw.precision, s4.precision);

  PduConfig pinned = pdu;
  pinned.pin_in_peak = true;
  const QuantRun s8 = run_quantized(q, seq, Mode::static8(), pdu);
  const QuantRun dp = run_quantized(q, seq, Mode::dynamic(), pinned);
  EXPECT_EQ(dp.trace, s8.trace);
  EXPECT_EQ(dp.precision, s8.precision);
}

TEST_F(RunQuantized, ActivityAccounting) {
  for (const Mode& mode : {Mode::static8(), Mode::static4(), Mode::dynamic(),
                           Mode::random(0.5, 3)}) {
    const QuantRun r = run_quantized(q, seq, mode, pdu);
    for (std::size_t l = 0; l < 2; ++l) {
      const std::uint64_t fan_in = q.layers[l].element_fan_in();
      for (std::size_t t = 0; t < seq.length(); ++t) {
        const StepActivity& a = r.activity[l][t];
        std::uint64_t low = 0;
        for (Precision p : r.precision[l][t]) low += p == Precision::Low4;
        ASSERT_EQ(a.elements_low, low);
        ASSERT_EQ(a.elements_low + a.elements_high, 8u);
        ASSERT_EQ(a.weight_nibbles, a.elements_low * fan_in);
        ASSERT_EQ(a.weight_offset_bits, a.elements_low * fan_in);
        ASSERT_EQ(a.weight_bytes, a.elements_high * fan_in);
        ASSERT_EQ(a.pdu_updates, mode.kind == ModeKind::Dynamic ? 8u : 0u);
      }
    }
  }
}

TEST_F(RunQuantized, DynamicUsesHighPrecisionExactlyAfterPeaks) {
  const QuantRun r = run_quantized(q, seq, Mode::dynamic(), pdu);
  for (std::size_t l = 0; l < 2; ++l) {
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(r.precision[l][0][k], Precision::Low4);
    for (std::size_t t = 1; t < seq.length(); ++t) {
      for (std::size_t k = 0; k < 8; ++k) {
        ASSERT_EQ(r.precision[l][t][k] == Precision::High8,
                  r.phase[l][t - 1][k] == Phase::InPeak);
      }
    }
  }
}

TEST_F(RunQuantized, Errors) {
  EXPECT_THROW(run_quantized(q, oracle::random_sequence(5, 7, 1), Mode::static8(), pdu),
               InvalidArgument);
  EXPECT_THROW(run_quantized(q, seq, Mode::random(1.5, 1), pdu), InvalidArgument);
  EXPECT_THROW(run_quantized(QuantizedModel{}, seq, Mode::static8(), pdu), InvalidArgument);
  EXPECT_THROW(Mode::parse("static16"), InvalidArgument);
  EXPECT_EQ(Mode::parse("dynamic").kind, ModeKind::Dynamic);
}

TEST(ErrorStats, Examples) {
  LstmTrace fp, q;
  fp.states = {{LstmState{Vector{2.0f}, Vector{0.0f}}}};
  q.states = {{LstmState{Vector{1.0f}, Vector{0.0f}}}};
  const LayerStepGrid<Phase> peak{{{Phase::InPeak}}};
  const ErrorStats s = relative_error_stats(fp, q, peak);
  EXPECT_EQ(s.peak_mean, 0.5);
  EXPECT_EQ(s.peak_count, 1u);
  EXPECT_EQ(s.stable_count, 0u);
  const ErrorStats same = relative_error_stats(fp, fp, peak);
  EXPECT_EQ(same.peak_mean, 0.0);
  EXPECT_EQ(same.stable_mean, 0.0);
  // Near-zero reference values use the denominator floor.
  fp.states[0][0].c[0] = 0.0f;
  q.states[0][0].c[0] = 0.002f;
  EXPECT_NEAR(relative_error_stats(fp, q, LayerStepGrid<Phase>{{{Phase::Stable}}}).stable_mean,
              2.0, 1e-6);
  EXPECT_NEAR(mean_abs_cell_error(fp, q), 0.002, 1e-9);
}

TEST(ErrorStats, Mismatch) {
  LstmTrace fp, q;
  fp.states = {{LstmState{Vector{2.0f}, Vector{0.0f}}}};
  q.states = {};
  EXPECT_THROW(relative_error_stats(fp, q, LayerStepGrid<Phase>{{{Phase::InPeak}}}),
               InvalidArgument);
}

}  // namespace
}  // namespace dynlstm
