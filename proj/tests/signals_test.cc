// Copyright 2026 The eeprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eeprof/signals.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "eeprof/error.h"
#include "eeprof/tensor_ops.h"
#include "eeprof/transformer.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace eeprof {
namespace {

using testing_support::Encode;
using testing_support::Fixture;

// Trace with one hidden vector and one logit vector per layer.
StepTrace MakeTrace(const std::vector<std::vector<float>>& hidden,
                    const std::vector<std::vector<float>>& logits) {
  StepTrace t;
  t.num_layers = static_cast<int>(hidden.size());
  t.d_model = static_cast<int>(hidden[0].size());
  t.vocab_size = static_cast<int>(logits[0].size());
  for (const auto& h : hidden) t.hidden.insert(t.hidden.end(), h.begin(), h.end());
  for (const auto& z : logits) t.logits.insert(t.logits.end(), z.begin(), z.end());
  return t;
}

const std::vector<GenerationResult>& FixtureRuns() {
  static const std::vector<GenerationResult> runs = [] {
    std::vector<GenerationResult> out;
    GenerationOptions opts;
    opts.max_tokens = 8;
    opts.capture = CaptureLevel::kFull;
    for (int p = 0; p < 10; ++p) {
      out.push_back(GreedyDecode(
          Fixture(), Encode("Question: what is " + std::to_string(p * 17) + "?"),
          opts));
    }
    return out;
  }();
  return runs;
}

std::vector<StepTrace> FixtureTraces() {
  std::vector<StepTrace> all;
  for (const auto& r : FixtureRuns()) {
    all.insert(all.end(), r.traces.begin(), r.traces.end());
  }
  return all;
}

TEST(CosineTest, Examples) {
  const std::vector<float> e1 = {1, 0}, e2 = {0, 1}, neg = {-1, 0};
  EXPECT_EQ(Cosine(e1, e1), 1.0);
  EXPECT_EQ(Cosine(e1, e2), 0.0);
  EXPECT_EQ(Cosine(e1, neg), -1.0);
  const std::vector<float> a = {1, 2, 3}, b = {4, 5, 6};
  EXPECT_NEAR(Cosine(a, b), 0.97463184619707627, 1e-12);
}

TEST(CosineTest, ZeroNormIsUndefined) {
  const std::vector<float> z = {0, 0, 0}, a = {1, 2, 3};
  EXPECT_THROW(Cosine(z, a), UndefinedSimilarityError);
  EXPECT_THROW(Cosine(a, z), UndefinedSimilarityError);
  EXPECT_THROW(Cosine(a, std::vector<float>{1, 2}), ValidationError);
}

TEST(CosineTest, PositiveScaleInvarianceAndBounds) {
  std::mt19937 rng(17);
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::uniform_real_distribution<float> c(1e-3f, 1e3f);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<float> u(1 + trial % 70), v(u.size());
    for (auto& x : u) x = n(rng);
    for (auto& x : v) x = n(rng);
    const double base = Cosine(u, v);
    EXPECT_GE(base, -1.0);
    EXPECT_LE(base, 1.0);
    const float scale = c(rng);
    std::vector<float> su = u;
    for (auto& x : su) x *= scale;
    EXPECT_NEAR(Cosine(su, v), base, 1e-6);
    EXPECT_NEAR(Cosine(v, u), base, 1e-15);
  }
}

TEST(TopKOverlapTest, Examples) {
  const std::vector<TokenId> a = {1, 2, 3, 4}, b = {5, 6, 7, 8}, c = {3, 4, 5, 6};
  EXPECT_EQ(TopKOverlap(a, a, 4), 1.0);
  EXPECT_EQ(TopKOverlap(a, b, 4), 0.0);
  EXPECT_EQ(TopKOverlap(a, c, 4), 0.5);
  EXPECT_EQ(TopKOverlap(std::vector<TokenId>{4, 3, 2, 1}, a, 4), 1.0);
  EXPECT_THROW(TopKOverlap(a, c, 5), ValidationError);
}

TEST(StepSimilarityTest, FinalLayerIsOneForEverySignal) {
  for (const StepTrace& t : FixtureTraces()) {
    for (const Signal& s : {Signal::HiddenState(), Signal::OutputLogits(),
                            Signal::TopK(10)}) {
      EXPECT_NEAR(StepSimilarity(t, t.num_layers, s), 1.0, 1e-12);
    }
  }
}

TEST(StepSimilarityTest, HiddenInvariantToRescaledIntermediate) {
  StepTrace t = FixtureTraces().front();
  const double before = StepSimilarity(t, 2, Signal::HiddenState());
  for (size_t i = 64; i < 128; ++i) t.hidden[i] *= 3.5f;
  EXPECT_NEAR(StepSimilarity(t, 2, Signal::HiddenState()), before, 1e-6);
}

TEST(StepSimilarityTest, TopKFromDigestMatchesTopKFromLogits) {
  for (const StepTrace& full : FixtureTraces()) {
    const StepTrace digest = CaptureAs(full, CaptureLevel::kTopK, 10);
    for (int k : {1, 5, 10}) {
      for (int l = 1; l <= 4; ++l) {
        EXPECT_EQ(StepSimilarity(full, l, Signal::TopK(k)),
                  StepSimilarity(digest, l, Signal::TopK(k)));
      }
    }
    EXPECT_THROW(StepSimilarity(digest, 1, Signal::TopK(11)), CapabilityError);
    EXPECT_THROW(StepSimilarity(digest, 1, Signal::HiddenState()),
                 CapabilityError);
  }
}

TEST(StepSimilarityTest, ProbabilityModeUsesSoftmax) {
  const StepTrace t = MakeTrace({{1, 0}, {0, 1}}, {{0, 0, 0}, {1, 0, 0}});
  EXPECT_THROW(StepSimilarity(t, 1, Signal::OutputLogits()),
               UndefinedSimilarityError);
  const double e = std::exp(1.0);
  const double p1 = 1.0 / 3.0;
  const double q0 = e / (e + 2), q1 = 1 / (e + 2);
  const double expect = (p1 * q0 + 2 * p1 * q1) /
                        (std::sqrt(3 * p1 * p1) * std::sqrt(q0 * q0 + 2 * q1 * q1));
  EXPECT_NEAR(StepSimilarity(t, 1, Signal::OutputLogits(), {true}), expect, 1e-7);
}

TEST(AggregateTest, SingleStepAndTwoStepStatistics) {
  ProfileBuilder one({Signal::OutputLogits()});
  one.AddSamples({{0.7, 0.9}});
  const auto p1 = one.Build("m", "d");
  EXPECT_EQ(p1.num_layers, 3);
  EXPECT_EQ(p1.signals[0].layers[0].mean, 0.7);
  EXPECT_EQ(p1.signals[0].layers[0].std, 0.0);
  EXPECT_EQ(p1.signals[0].layers[1].count, 1);

  ProfileBuilder two({Signal::OutputLogits()});
  two.AddSamples({{0.2}});
  two.AddSamples({{0.8}});
  const auto p2 = two.Build("m", "d");
  EXPECT_NEAR(p2.signals[0].layers[0].mean, 0.5, 1e-15);
  EXPECT_NEAR(p2.signals[0].layers[0].std, 0.3, 1e-15);
}

TEST(AggregateTest, EmptyAndMismatchedInputsAreRejected) {
  EXPECT_THROW(Aggregate({}, {Signal::OutputLogits()}), ValidationError);
  ProfileBuilder b({Signal::OutputLogits()});
  EXPECT_THROW(b.Build("m", "d"), ValidationError);
  b.AddSamples({{0.1, 0.2}});
  EXPECT_THROW(b.AddSamples({{0.1}}), ValidationError);
}

TEST(AggregateTest, MatchesScalarLoopOracle) {
  const auto traces = FixtureTraces();
  ASSERT_EQ(traces.size(), 80u);
  const std::vector<Signal> signals = {Signal::HiddenState(),
                                       Signal::OutputLogits(), Signal::TopK(10)};
  const auto profile = Aggregate(traces, signals, {}, "fixture", "ten");
  ASSERT_EQ(profile.signals.size(), 3u);
  for (size_t s = 0; s < signals.size(); ++s) {
    const auto& layers = profile.signals[s].layers;
    ASSERT_EQ(layers.size(), 3u);
    for (int l = 1; l <= 3; ++l) {
      double sum = 0.0;
      std::vector<double> xs;
      for (const auto& t : traces) {
        double x;
        if (s == 2) {
          const auto a = TopKIndices(t.Logits(l), 10);
          const auto f = TopKIndices(t.Logits(4), 10);
          int shared = 0;
          for (TokenId id : a) shared += std::count(f.begin(), f.end(), id);
          x = shared / 10.0;
        } else {
          const auto u = s == 0 ? t.Hidden(l) : t.Logits(l);
          const auto v = s == 0 ? t.Hidden(4) : t.Logits(4);
          double dot = 0, nu = 0, nv = 0;
          for (size_t i = 0; i < u.size(); ++i) {
            dot += static_cast<double>(u[i]) * v[i];
            nu += static_cast<double>(u[i]) * u[i];
            nv += static_cast<double>(v[i]) * v[i];
          }
          x = dot / std::sqrt(nu * nv);
        }
        xs.push_back(x);
        sum += x;
      }
      const double mean = sum / xs.size();
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      EXPECT_NEAR(layers[l - 1].mean, mean, 1e-12);
      EXPECT_NEAR(layers[l - 1].std, std::sqrt(var / xs.size()), 1e-12);
      EXPECT_EQ(layers[l - 1].count, 80);
      EXPECT_GE(layers[l - 1].mean, s == 2 ? 0.0 : -1.0);
      EXPECT_LE(layers[l - 1].mean, 1.0);
    }
  }
}

TEST(AggregateTest, PermutationInvariantBitForBit) {
  auto traces = FixtureTraces();
  const std::vector<Signal> signals = {Signal::HiddenState(),
                                       Signal::OutputLogits(), Signal::TopK(5)};
  const auto base = Aggregate(traces, signals);
  std::mt19937 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(traces.begin(), traces.end(), rng);
    const auto p = Aggregate(traces, signals);
    for (size_t s = 0; s < signals.size(); ++s) {
      for (size_t l = 0; l < 3; ++l) {
        EXPECT_EQ(p.signals[s].layers[l].mean, base.signals[s].layers[l].mean);
        EXPECT_EQ(p.signals[s].layers[l].std, base.signals[s].layers[l].std);
      }
    }
  }
}

TEST(AggregateTest, ProfileLookupAndSignalNames) {
  const auto p = Aggregate(FixtureTraces(), {Signal::OutputLogits()});
  EXPECT_TRUE(p.Has(Signal::OutputLogits()));
  EXPECT_FALSE(p.Has(Signal::HiddenState()));
  EXPECT_THROW(p.For(Signal::TopK(10)), CapabilityError);
  EXPECT_EQ(ParseSignal("hidden").kind, Signal::Kind::kHiddenState);
  EXPECT_EQ(ParseSignal("topk", 3), Signal::TopK(3));
  EXPECT_THROW(ParseSignal("entropy"), ValidationError);
  EXPECT_EQ(AvailableSignals(CaptureAs(FixtureTraces()[0], CaptureLevel::kTopK, 10)).size(), 1u);
}

}  // namespace
}  // namespace eeprof
