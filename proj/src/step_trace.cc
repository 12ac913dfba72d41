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

#include "eeprof/step_trace.h"

#include <cstring>

#include "eeprof/error.h"
#include "eeprof/tensor_ops.h"

namespace eeprof {
namespace {

void CheckLayer(const StepTrace& t, int layer) {
  if (layer < 1 || layer > t.num_layers) {
    throw ValidationError("layer " + std::to_string(layer) +
                          " outside [1, " + std::to_string(t.num_layers) +
                          "]");
  }
}

template <typename T>
bool SameBits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

}  // namespace

std::string ToString(CaptureLevel level) {
  switch (level) {
    case CaptureLevel::kNone:
      return "none";
    case CaptureLevel::kTopK:
      return "topk";
    case CaptureLevel::kFull:
      return "full";
  }
  return "none";
}

CaptureLevel ParseCaptureLevel(const std::string& s) {
  if (s == "none") return CaptureLevel::kNone;
  if (s == "topk") return CaptureLevel::kTopK;
  if (s == "full") return CaptureLevel::kFull;
  throw ValidationError("unknown capture level '" + s + "'");
}

CaptureLevel StepTrace::level() const {
  if (has_hidden() && has_logits()) return CaptureLevel::kFull;
  if (has_topk()) return CaptureLevel::kTopK;
  return CaptureLevel::kNone;
}

std::span<const float> StepTrace::Hidden(int layer) const {
  CheckLayer(*this, layer);
  if (!has_hidden()) throw CapabilityError("trace has no hidden states");
  return std::span<const float>(hidden).subspan(
      static_cast<size_t>(layer - 1) * d_model, d_model);
}

std::span<const float> StepTrace::Logits(int layer) const {
  CheckLayer(*this, layer);
  if (!has_logits()) throw CapabilityError("trace has no full logits");
  return std::span<const float>(logits).subspan(
      static_cast<size_t>(layer - 1) * vocab_size, vocab_size);
}

const TopKDigest& StepTrace::TopK(int layer) const {
  CheckLayer(*this, layer);
  if (!has_topk()) throw CapabilityError("trace has no top-K digests");
  return topk[layer - 1];
}

StepTrace CaptureAs(const StepTrace& full, CaptureLevel level, int k) {
  StepTrace out;
  out.step = full.step;
  out.num_layers = full.num_layers;
  out.d_model = full.d_model;
  out.vocab_size = full.vocab_size;
  out.chosen_token = full.chosen_token;
  if (level == CaptureLevel::kNone) return out;
  if (full.has_topk() && full.topk_k() == k) {
    out.topk = full.topk;
  } else {
    out.topk.reserve(full.num_layers);
    for (int layer = 1; layer <= full.num_layers; ++layer) {
      const auto logits = full.Logits(layer);
      TopKDigest d;
      d.ids = TopKIndices(logits, k);
      for (TokenId id : d.ids) d.values.push_back(logits[id]);
      out.topk.push_back(std::move(d));
    }
  }
  if (level == CaptureLevel::kFull) {
    if (!full.has_hidden() || !full.has_logits()) {
      throw CapabilityError("full capture requested from a partial trace");
    }
    out.hidden = full.hidden;
    out.logits = full.logits;
  }
  return out;
}

bool BitwiseEqual(const StepTrace& a, const StepTrace& b) {
  if (a.step != b.step || a.num_layers != b.num_layers ||
      a.d_model != b.d_model || a.vocab_size != b.vocab_size ||
      a.chosen_token != b.chosen_token || !SameBits(a.hidden, b.hidden) ||
      !SameBits(a.logits, b.logits) || a.topk.size() != b.topk.size()) {
    return false;
  }
  for (size_t i = 0; i < a.topk.size(); ++i) {
    if (a.topk[i].ids != b.topk[i].ids ||
        !SameBits(a.topk[i].values, b.topk[i].values)) {
      return false;
    }
  }
  return true;
}

}  // namespace eeprof
