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

#include "eeprof/error.h"

namespace eeprof {
namespace {

double PowTotal(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(base, exponent);
}

}  // namespace

std::string ToString(SimilarityMapping m) {
  return m == SimilarityMapping::kLinear ? "linear" : "identity";
}

void EasParams::Validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("EAS: alpha must lie in [0, 1]");
  }
}

SimilarityMapping EasParams::EffectiveMapping() const {
  return signal.kind == Signal::Kind::kTopK ? SimilarityMapping::kIdentity
                                            : mapping;
}

double SkipRatio(int layer, int num_layers) {
  if (num_layers < 1 || layer < 1 || layer > num_layers) {
    throw ValidationError("skip_ratio: layer " + std::to_string(layer) +
                          " outside [1, " + std::to_string(num_layers) + "]");
  }
  return static_cast<double>(num_layers - layer) / num_layers;
}

double MapSimilarity(double s) {
  if (!(std::fabs(s) <= 1.0)) {
    throw ValidationError("map_similarity: |S| > 1");
  }
  return (s + 1.0) / 2.0;
}

double LayerScore(double mapped_similarity, double skip_ratio, double alpha) {
  return PowTotal(mapped_similarity, alpha) *
         PowTotal(skip_ratio, 1.0 - alpha);
}

EasReport ComputeEas(const SimilarityProfile& profile,
                     const EasParams& params) {
  params.Validate();
  const SignalProfile& sp = profile.For(params.signal);
  const int L = profile.num_layers;
  if (L < 2 || static_cast<int>(sp.layers.size()) != L - 1) {
    throw ValidationError("EAS: profile must cover layers 1.." +
                          std::to_string(L - 1));
  }
  const SimilarityMapping mapping = params.EffectiveMapping();
  EasReport report;
  report.model_id = profile.model_id;
  report.params = params;
  report.num_layers = L;
  double sum = 0.0;
  for (int layer = 1; layer < L; ++layer) {
    EasLayer row;
    row.layer = layer;
    row.skip_ratio = SkipRatio(layer, L);
    row.mean_similarity = sp.layers[layer - 1].mean;
    if (mapping == SimilarityMapping::kLinear) {
      row.mapped_similarity = MapSimilarity(row.mean_similarity);
    } else {
      if (row.mean_similarity < 0.0 || row.mean_similarity > 1.0) {
        throw ValidationError("EAS: identity mapping needs similarity in "
                              "[0, 1]");
      }
      row.mapped_similarity = row.mean_similarity;
    }
    row.score = LayerScore(row.mapped_similarity, row.skip_ratio, params.alpha);
    sum += row.score;
    report.layers.push_back(row);
  }
  report.eas = sum / (L - 1);
  return report;
}

double RelativeEas(const EasReport& candidate, const EasReport& baseline) {
  if (baseline.eas == 0.0) {
    throw ValidationError("relative EAS: baseline score is zero");
  }
  return candidate.eas / baseline.eas;
}

}  // namespace eeprof
