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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "dynlstm/errors.hpp"

namespace dynlstm {
namespace {

PduConfig small_config() {
  PduConfig c;
  c.t_profile = 4;
  c.m_max_peak = 10;
  c.n_max_stable = 10;
  c.beta = 0.1;
  return c;
}

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> step(-0.05, 0.05);
  std::bernoulli_distribution spike(0.05);
  std::vector<double> v(n);
  double x = 0.0;
  for (double& y : v) {
    x += step(rng);
    y = x + (spike(rng) ? 1.0 : 0.0);
  }
  return v;
}

std::vector<Phase> phases(const PduConfig& c, const std::vector<double>& trace) {
  ElementTracker t = ElementTracker::initial(c);
  std::vector<Phase> out;
  for (double v : trace) {
    pdu_observe(t, c, v);
    out.push_back(t.phase);
  }
  return out;
}

TEST(Thresholds, Examples) {
  const Thresholds a = thresholds(-0.2, 0.6, 0.1, 1e-6);
  EXPECT_NEAR(a.lower, -0.28, 1e-12);
  EXPECT_NEAR(a.upper, 0.68, 1e-12);
  const Thresholds b = thresholds(0.0, 0.0, 0.1, 1e-6);
  EXPECT_NEAR(b.lower, -1e-7, 1e-20);
  EXPECT_NEAR(b.upper, 1e-7, 1e-20);
  const Thresholds c = thresholds(-0.3, 0.45, 0.0, 1e-6);
  EXPECT_EQ(c.lower, -0.3);
  EXPECT_EQ(c.upper, 0.45);
  EXPECT_THROW(thresholds(1.0, 0.0, 0.1, 1e-6), InvalidArgument);
}

TEST(PduConfig, ForSequence) {
  const PduConfig a = PduConfig::for_sequence(200);
  EXPECT_EQ(a.t_profile, 10);
  EXPECT_EQ(a.m_max_peak, 10);
  EXPECT_EQ(a.n_max_stable, 10);
  const PduConfig b = PduConfig::for_sequence(10);
  EXPECT_EQ(b.t_profile, 4);
  EXPECT_EQ(b.m_max_peak, 1);
  EXPECT_EQ(PduConfig::for_sequence(5000).t_profile, 64);
  EXPECT_EQ(PduConfig::for_sequence(5000).m_max_peak, 250);
  EXPECT_EQ(PduConfig::for_sequence(0).n_max_stable, 1);
}

TEST(PduConfig, Validate) {
  PduConfig c;
  EXPECT_NO_THROW(c.validate());
  c.beta = std::numeric_limits<double>::infinity();
  EXPECT_NO_THROW(c.validate());
  c.beta = -0.1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = PduConfig{};
  c.t_profile = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = PduConfig{};
  c.epsilon_range = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(PduObserve, HandTrace) {
  const PduConfig c = small_config();
  ElementTracker t = ElementTracker::initial(c);
  for (double v : {0.0, 0.1, -0.1}) {
    EXPECT_EQ(pdu_observe(t, c, v), Precision::Low4);
    EXPECT_EQ(t.phase, Phase::Profiling);
  }
  EXPECT_EQ(pdu_observe(t, c, 0.2), Precision::Low4);
  EXPECT_EQ(t.phase, Phase::Stable);
  EXPECT_NEAR(t.lower, -0.13, 1e-12);
  EXPECT_NEAR(t.upper, 0.23, 1e-12);

  EXPECT_EQ(pdu_observe(t, c, 0.5), Precision::High8);
  EXPECT_EQ(t.phase, Phase::InPeak);
  EXPECT_EQ(pdu_observe(t, c, 0.2), Precision::Low4);
  EXPECT_EQ(t.phase, Phase::Stable);
}

TEST(PduObserve, ConstantSignalReprofilesEveryNSteps) {
  const PduConfig c = small_config();
  ElementTracker t = ElementTracker::initial(c);
  std::vector<Phase> seen;
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(pdu_observe(t, c, 0.0), Precision::Low4);
    seen.push_back(t.phase);
  }
  EXPECT_EQ(std::count(seen.begin(), seen.end(), Phase::InPeak), 0);
  // Steps 4..13 stable, 14..17 profiling, then the cycle repeats.
  for (int i = 3; i < 200; ++i) {
    const int pos = (i - 3) % 14;
    EXPECT_EQ(seen[i], pos < 10 ? Phase::Stable : Phase::Profiling) << i;
  }
}

TEST(PduObserve, PeakTimesOutIntoProfiling) {
  const PduConfig c = small_config();
  ElementTracker t = ElementTracker::initial(c);
  for (int i = 0; i < 4; ++i) pdu_observe(t, c, 0.0);
  for (int i = 1; i <= 10; ++i) {
    pdu_observe(t, c, 5.0);
    EXPECT_EQ(t.phase, Phase::InPeak) << i;
    EXPECT_EQ(t.steps_in_phase, i);
  }
  pdu_observe(t, c, 5.0);
  EXPECT_EQ(t.phase, Phase::Profiling);
  EXPECT_EQ(t.steps_in_phase, 0);
  EXPECT_EQ(t.min_c, std::numeric_limits<double>::infinity());
  EXPECT_EQ(t.next_precision, Precision::Low4);
}

TEST(PduObserve, JumpAfterConstantProfileIsPeak) {
  for (double beta : {0.0, 0.1, 2.0}) {
    PduConfig c = small_config();
    c.beta = beta;
    ElementTracker t = ElementTracker::initial(c);
    for (int i = 0; i < 4; ++i) pdu_observe(t, c, 0.25);
    const double jump = c.epsilon_range * (1 + beta) * 1.01;
    EXPECT_EQ(pdu_observe(t, c, 0.25 + jump), Precision::High8) << beta;
  }
}

TEST(PduObserve, InfiniteBetaNeverPeaks) {
  PduConfig c = small_config();
  c.beta = std::numeric_limits<double>::infinity();
  ElementTracker t = ElementTracker::initial(c);
  for (double v : random_walk(2000, 3)) EXPECT_EQ(pdu_observe(t, c, v), Precision::Low4);
}

TEST(PduObserve, PinnedTrackerStaysInPeak) {
  PduConfig c = small_config();
  c.pin_in_peak = true;
  ElementTracker t = ElementTracker::initial(c);
  EXPECT_EQ(t.next_precision, Precision::High8);
  for (double v : random_walk(200, 4)) EXPECT_EQ(pdu_observe(t, c, v), Precision::High8);
  EXPECT_EQ(t.phase, Phase::InPeak);
}

TEST(PduObserve, RejectsNonFinite) {
  const PduConfig c = small_config();
  ElementTracker t = ElementTracker::initial(c);
  EXPECT_THROW(pdu_observe(t, c, std::nan("")), InvalidArgument);
}

TEST(PduInvariants, RandomTraces) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PduConfig c = small_config();
    c.m_max_peak = 1 + static_cast<int>(seed % 7);
    c.n_max_stable = 1 + static_cast<int>((seed / 7) % 7);
    ElementTracker t = ElementTracker::initial(c);
    Phase prev = t.phase;
    int run = 0;
    for (double v : random_walk(1000, seed)) {
      const Precision p = pdu_observe(t, c, v);
      ASSERT_EQ(p, t.next_precision);
      ASSERT_EQ(p == Precision::High8, t.phase == Phase::InPeak);
      if (t.phase != Phase::Profiling) {
        ASSERT_LE(t.lower, t.upper);
      }
      run = t.phase == prev ? run + 1 : 1;
      prev = t.phase;
      if (t.phase != Phase::Profiling) {
        ASSERT_LE(run, std::max(c.m_max_peak, c.n_max_stable));
      } else {
        ASSERT_LE(run, c.t_profile + 1);
      }
    }
  }
}

// With re-profiling disabled, a wider band flags a subset of the steps a
// narrower band flags.
TEST(PduInvariants, MonotoneMargin) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto trace = random_walk(600, 100 + seed);
    PduConfig c = small_config();
    c.m_max_peak = c.n_max_stable = 1 << 20;
    std::vector<std::vector<Phase>> by_beta;
    for (double beta : {0.0, 0.05, 0.1, 0.2, 1.0}) {
      c.beta = beta;
      by_beta.push_back(phases(c, trace));
    }
    for (std::size_t b = 1; b < by_beta.size(); ++b) {
      for (std::size_t i = 0; i < trace.size(); ++i) {
        if (by_beta[b][i] == Phase::InPeak) {
          ASSERT_EQ(by_beta[b - 1][i], Phase::InPeak);
        }
      }
    }
  }
}

TEST(PduBatch, FlatAndSpiking) {
  const PduConfig c = small_config();
  std::vector<ElementTracker> t(2, ElementTracker::initial(c));
  const std::vector<float> profile[] = {{0.0f, 0.0f}, {0.0f, 0.1f}, {0.0f, -0.1f}, {0.0f, 0.2f}};
  for (const auto& v : profile) pdu_batch_observe(t, c, v);
  const std::vector<float> spike{0.0f, 0.5f};
  EXPECT_EQ(pdu_batch_observe(t, c, spike),
            (std::vector<Precision>{Precision::Low4, Precision::High8}));
  std::vector<ElementTracker> none;
  EXPECT_TRUE(pdu_batch_observe(none, c, std::vector<float>{}).empty());
  EXPECT_THROW(pdu_batch_observe(t, c, std::vector<float>{1.0f}), InvalidArgument);
}

TEST(PduBatch, PermutationEquivariance) {
  const PduConfig c = small_config();
  constexpr std::size_t kElems = 6;
  std::vector<std::vector<double>> traces;
  for (std::size_t k = 0; k < kElems; ++k) traces.push_back(random_walk(300, 500 + k));
  std::vector<std::size_t> perm(kElems);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<ElementTracker> a(kElems, ElementTracker::initial(c)), b = a;
  for (std::size_t s = 0; s < 300; ++s) {
    std::vector<float> va(kElems), vb(kElems);
    for (std::size_t k = 0; k < kElems; ++k) {
      va[k] = static_cast<float>(traces[k][s]);
      vb[k] = static_cast<float>(traces[perm[k]][s]);
    }
    const auto pa = pdu_batch_observe(a, c, va);
    const auto pb = pdu_batch_observe(b, c, vb);
    for (std::size_t k = 0; k < kElems; ++k) ASSERT_EQ(pb[k], pa[perm[k]]);
  }
}

}  // namespace
}  // namespace dynlstm
