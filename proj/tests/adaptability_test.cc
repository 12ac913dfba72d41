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

#include "eeprof/adaptability.h"

#include <cmath>
#include <random>

#include "eeprof/error.h"
#include "gtest/gtest.h"

namespace eeprof {
namespace {

SimilarityProfile Profile(const std::vector<double>& means,
                          Signal signal = Signal::OutputLogits()) {
  SimilarityProfile p;
  p.model_id = "synthetic";
  p.num_layers = static_cast<int>(means.size()) + 1;
  SignalProfile sp{signal, {}};
  for (double m : means) sp.layers.push_back({m, 0.0, 1});
  p.signals.push_back(sp);
  return p;
}

double Eas(const std::vector<double>& means, double alpha = 0.5) {
  EasParams params;
  params.alpha = alpha;
  return ComputeEas(Profile(means), params).eas;
}

TEST(SkipRatioTest, Examples) {
  EXPECT_EQ(SkipRatio(1, 4), 0.75);
  EXPECT_EQ(SkipRatio(4, 4), 0.0);
  EXPECT_EQ(SkipRatio(16, 32), 0.5);
  EXPECT_THROW(SkipRatio(0, 4), ValidationError);
  EXPECT_THROW(SkipRatio(5, 4), ValidationError);
}

TEST(MapSimilarityTest, EndpointsAndSymmetry) {
  EXPECT_EQ(MapSimilarity(1.0), 1.0);
  EXPECT_EQ(MapSimilarity(-1.0), 0.0);
  EXPECT_EQ(MapSimilarity(0.0), 0.5);
  EXPECT_THROW(MapSimilarity(1.5), ValidationError);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    EXPECT_NEAR(MapSimilarity(a) + MapSimilarity(-a), 1.0, 1e-15);
  }
}

TEST(LayerScoreTest, Examples) {
  EXPECT_EQ(LayerScore(0.8, 0.5, 0.0), 0.5);
  EXPECT_EQ(LayerScore(0.8, 0.5, 1.0), 0.8);
  EXPECT_NEAR(LayerScore(0.8, 0.5, 0.5), 0.63245553203367587, 1e-12);
  EXPECT_EQ(LayerScore(0.0, 0.5, 0.0), 0.5);
  EXPECT_EQ(LayerScore(0.5, 0.0, 1.0), 0.5);
}

TEST(EasTest, SyntheticProfilesMatchHighPrecisionOracle) {
  EXPECT_NEAR(Eas({1.0, 1.0, 1.0}), 0.69104406165699539, 1e-9);
  EasParams params;
  const auto r = ComputeEas(Profile({0.0, 0.6, 0.8}), params);
  ASSERT_EQ(r.layers.size(), 3u);
  EXPECT_EQ(r.num_layers, 4);
  EXPECT_NEAR(r.layers[0].score, 0.61237243569579452, 1e-12);
  EXPECT_NEAR(r.layers[1].score, 0.63245553203367587, 1e-12);
  EXPECT_NEAR(r.layers[2].score, 0.47434164902525690, 1e-12);
  EXPECT_NEAR(r.eas, 0.57305653891824243, 1e-9);
}

TEST(EasTest, DegenerateProfilesRecoverBaselines) {
  // Fully anti-aligned layers score zero whenever alpha > 0.
  EXPECT_EQ(Eas({-1.0, -1.0, -1.0}), 0.0);
  // alpha = 0 reduces to the mean skip ratio.
  EXPECT_NEAR(Eas({0.1, -0.4, 0.7}, 0.0), (0.75 + 0.5 + 0.25) / 3, 1e-15);
  // alpha = 1 reduces to the mean mapped similarity.
  EXPECT_NEAR(Eas({0.1, -0.4, 0.7}, 1.0), (0.55 + 0.3 + 0.85) / 3, 1e-15);
}

TEST(EasTest, BoundedAndMonotoneInSimilarity) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> a(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int L = 2 + trial % 30;
    std::vector<double> s(L - 1);
    for (double& x : s) x = u(rng);
    const double alpha = a(rng);
    const double base = Eas(s, alpha);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0);
    const size_t i = rng() % s.size();
    auto raised = s;
    raised[i] = std::min(1.0, raised[i] + 0.25);
    EXPECT_GE(Eas(raised, alpha), base);
  }
}

TEST(EasTest, TopKUsesIdentityMapping) {
  EasParams params;
  params.signal = Signal::TopK(10);
  EXPECT_EQ(params.EffectiveMapping(), SimilarityMapping::kIdentity);
  const auto r = ComputeEas(Profile({0.36, 0.64, 0.81}, Signal::TopK(10)), params);
  const double expect = (std::sqrt(0.36 * 0.75) + std::sqrt(0.64 * 0.5) +
                         std::sqrt(0.81 * 0.25)) / 3;
  EXPECT_NEAR(r.eas, expect, 1e-15);
}

TEST(EasTest, InvalidInputs) {
  EasParams params;
  params.alpha = 1.5;
  EXPECT_THROW(ComputeEas(Profile({0.5}), params), ValidationError);
  params.alpha = 0.5;
  params.signal = Signal::HiddenState();
  EXPECT_THROW(ComputeEas(Profile({0.5}), params), CapabilityError);
}

TEST(RelativeEasTest, DividesByBaseline) {
  EasReport base, a, b, zero;
  base.eas = 0.52;
  a.eas = 0.36;
  b.eas = 0.59;
  EXPECT_NEAR(RelativeEas(a, base), 0.69230769230769231, 1e-12);
  EXPECT_NEAR(RelativeEas(b, base), 1.1346153846153846, 1e-12);
  EXPECT_EQ(RelativeEas(base, base), 1.0);
  EXPECT_THROW(RelativeEas(a, zero), ValidationError);
}

}  // namespace
}  // namespace eeprof
