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

#ifndef EEPROF_TENSOR_OPS_H_
#define EEPROF_TENSOR_OPS_H_

// float32 kernels for the reference runtime. Accumulation order is fixed so
// results are reproducible run to run.

#include <span>
#include <vector>

#include "eeprof/model.h"

namespace eeprof {

// out = x * gain / sqrt(mean(x^2) + eps)
void RmsNorm(std::span<const float> x, std::span<const float> gain, float eps,
             std::span<float> out);

// out = x * W for W stored [in x out] row-major.
void MatVec(std::span<const float> x, const Tensor& w, std::span<float> out);

// Exact (erf-based) GELU, in place.
void GeluInPlace(std::span<float> x);

// Max-subtracted softmax, in place.
void SoftmaxInPlace(std::span<float> x);

// Rotates consecutive pairs (2i, 2i+1) of one head by pos * theta^(-2i/dim).
void ApplyRope(std::span<float> head, int pos, float theta);

// Index of the largest value; ties go to the lowest index.
TokenId Argmax(std::span<const float> values);

// Indices of the k largest values ordered by (value desc, index asc).
std::vector<TokenId> TopKIndices(std::span<const float> values, int k);

}  // namespace eeprof

#endif  // EEPROF_TENSOR_OPS_H_
