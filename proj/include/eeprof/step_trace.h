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

#ifndef EEPROF_STEP_TRACE_H_
#define EEPROF_STEP_TRACE_H_

#include <span>
#include <string>
#include <vector>

#include "eeprof/model.h"

namespace eeprof {

// How much per-layer state a decoding run keeps.
enum class CaptureLevel { kNone, kTopK, kFull };

std::string ToString(CaptureLevel level);
CaptureLevel ParseCaptureLevel(const std::string& s);

// The K highest logits of one layer, ordered by (value desc, id asc).
struct TopKDigest {
  std::vector<TokenId> ids;
  std::vector<float> values;
};

// Per generated token: last-position state of every layer.
//
// Layers are numbered 1..L; layer L is the final block and its logits are
// the decoding logits.
struct StepTrace {
  int step = 0;
  int num_layers = 0;
  int d_model = 0;
  int vocab_size = 0;
  TokenId chosen_token = -1;
  std::vector<float> hidden;       // num_layers * d_model, or empty
  std::vector<float> logits;       // num_layers * vocab_size, or empty
  std::vector<TopKDigest> topk;    // num_layers entries, or empty

  bool has_hidden() const { return !hidden.empty(); }
  bool has_logits() const { return !logits.empty(); }
  bool has_topk() const { return !topk.empty(); }
  int topk_k() const {
    return topk.empty() ? 0 : static_cast<int>(topk.front().ids.size());
  }
  CaptureLevel level() const;

  std::span<const float> Hidden(int layer) const;
  std::span<const float> Logits(int layer) const;
  const TopKDigest& TopK(int layer) const;
};

// Strips a full trace down to `level`; top-K digests of size `k` are
// computed from the logits when absent.
StepTrace CaptureAs(const StepTrace& full, CaptureLevel level, int k);

// Field-by-field equality with floats compared by bit pattern.
bool BitwiseEqual(const StepTrace& a, const StepTrace& b);

}  // namespace eeprof

#endif  // EEPROF_STEP_TRACE_H_
