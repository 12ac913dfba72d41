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

#include "eeprof/tensor_ops.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eeprof/error.h"

namespace eeprof {

void RmsNorm(std::span<const float> x, std::span<const float> gain, float eps,
             std::span<float> out) {
  float ss = 0.0f;
  for (float v : x) ss += v * v;
  const float inv = 1.0f / std::sqrt(ss / static_cast<float>(x.size()) + eps);
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] * inv * gain[i];
}

void MatVec(std::span<const float> x, const Tensor& w, std::span<float> out) {
  const size_t cols = static_cast<size_t>(w.shape[1]);
  std::fill(out.begin(), out.end(), 0.0f);
  const float* row = w.data.data();
  for (size_t i = 0; i < x.size(); ++i, row += cols) {
    const float xi = x[i];
    for (size_t j = 0; j < cols; ++j) out[j] += xi * row[j];
  }
}

void GeluInPlace(std::span<float> x) {
  constexpr float kInvSqrt2 = 0.70710678118654752f;
  for (float& v : x) v = 0.5f * v * (1.0f + std::erf(v * kInvSqrt2));
}

void SoftmaxInPlace(std::span<float> x) {
  if (x.empty()) return;
  const float mx = *std::max_element(x.begin(), x.end());
  float sum = 0.0f;
  for (float& v : x) {
    v = std::exp(v - mx);
    sum += v;
  }
  const float inv = 1.0f / sum;
  for (float& v : x) v *= inv;
}

void ApplyRope(std::span<float> head, int pos, float theta) {
  const size_t dim = head.size();
  for (size_t i = 0; i + 1 < dim; i += 2) {
    const double freq =
        std::pow(static_cast<double>(theta), -static_cast<double>(i) / dim);
    const double angle = pos * freq;
    const float c = static_cast<float>(std::cos(angle));
    const float s = static_cast<float>(std::sin(angle));
    const float a = head[i];
    const float b = head[i + 1];
    head[i] = a * c - b * s;
    head[i + 1] = a * s + b * c;
  }
}

TokenId Argmax(std::span<const float> values) {
  if (values.empty()) throw ValidationError("argmax of empty vector");
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<TokenId>(best);
}

std::vector<TokenId> TopKIndices(std::span<const float> values, int k) {
  if (k < 1 || static_cast<size_t>(k) > values.size()) {
    throw ValidationError("top-K: K=" + std::to_string(k) +
                          " outside [1, " + std::to_string(values.size()) +
                          "]");
  }
  std::vector<TokenId> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](TokenId a, TokenId b) {
                      if (values[a] != values[b]) return values[a] > values[b];
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

}  // namespace eeprof
