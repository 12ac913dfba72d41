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

#ifndef EEPROF_ADAPTABILITY_H_
#define EEPROF_ADAPTABILITY_H_

// Early-exit Adaptability Score (EAS).
//
// For each candidate exit layer l in 1..L-1:
//   w_l  = (L - l) / L                       skip ratio
//   S~_l = f(mean similarity of layer l)     mapped into [0, 1]
//   A_l  = S~_l^alpha * w_l^(1 - alpha)      weighted geometric mean
// and EAS is the unweighted mean of A_l.

#include <string>
#include <vector>

#include "eeprof/signals.h"

namespace eeprof {

enum class SimilarityMapping {
  kLinear,    // (S + 1) / 2
  kIdentity,  // S, for signals already in [0, 1]
};

std::string ToString(SimilarityMapping m);

struct EasParams {
  double alpha = 0.5;
  Signal signal = Signal::OutputLogits();
  // Top-K overlap is already in [0, 1] and always uses kIdentity.
  SimilarityMapping mapping = SimilarityMapping::kLinear;

  void Validate() const;
  SimilarityMapping EffectiveMapping() const;
};

struct EasLayer {
  int layer = 0;
  double skip_ratio = 0.0;
  double mean_similarity = 0.0;
  double mapped_similarity = 0.0;
  double score = 0.0;
};

struct EasReport {
  std::string model_id;
  EasParams params;
  int num_layers = 0;
  std::vector<EasLayer> layers;
  double eas = 0.0;
};

// (L - layer) / L. Throws ValidationError unless 1 <= layer <= L.
double SkipRatio(int layer, int num_layers);

// (S + 1) / 2. Throws ValidationError if |S| > 1.
double MapSimilarity(double s);

// s_mapped^alpha * w^(1 - alpha), with 0^0 taken as 1.
double LayerScore(double mapped_similarity, double skip_ratio, double alpha);

EasReport ComputeEas(const SimilarityProfile& profile, const EasParams& params);

// candidate.eas / baseline.eas. Throws ValidationError if baseline is 0.
double RelativeEas(const EasReport& candidate, const EasReport& baseline);

}  // namespace eeprof

#endif  // EEPROF_ADAPTABILITY_H_
